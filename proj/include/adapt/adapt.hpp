#pragma once

#include "adapt/core.hpp"
#include "adapt/knapsack.hpp"
#include "adapt/oracle.hpp"
#include "adapt/pellet.hpp"
#include "adapt/secular.hpp"
