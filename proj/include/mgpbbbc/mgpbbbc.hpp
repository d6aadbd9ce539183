#pragma once

#include "benchmarks.hpp"
#include "clustering.hpp"
#include "core.hpp"
#include "crunchbang.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "survival.hpp"
