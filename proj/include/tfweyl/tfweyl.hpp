#pragma once

#include "tfweyl/error.hpp"
#include "tfweyl/parallel.hpp"
#include "tfweyl/weights.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/fixtures.hpp"
#include "tfweyl/transforms.hpp"
#include "tfweyl/operators.hpp"
#include "tfweyl/modspaces.hpp"
#include "tfweyl/diagnostics.hpp"
#include "tfweyl/io.hpp"
