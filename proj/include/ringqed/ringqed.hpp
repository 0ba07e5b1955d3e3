#pragma once

#include "ringqed/analysis.hpp"
#include "ringqed/arrowhead.hpp"
#include "ringqed/constants.hpp"
#include "ringqed/core_model.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/error.hpp"
#include "ringqed/io/config.hpp"
#include "ringqed/io/csv.hpp"
#include "ringqed/io/format.hpp"
#include "ringqed/io/svg.hpp"
#include "ringqed/spectral.hpp"
#include "ringqed/sweep.hpp"
