#pragma once

#include "tcim/bitvector.hpp"
#include "tcim/error.hpp"
#include "tcim/generators.hpp"
#include "tcim/graph_io.hpp"
#include "tcim/pim_sim.hpp"
#include "tcim/slicing.hpp"
#include "tcim/tc_kernel.hpp"
