#pragma once

// Umbrella header for the survival-analysis toolkit.

#include "trashfire/calibration.hpp"
#include "trashfire/concordance.hpp"
#include "trashfire/cost.hpp"
#include "trashfire/dataset.hpp"
#include "trashfire/error.hpp"
#include "trashfire/family.hpp"
#include "trashfire/fit.hpp"
#include "trashfire/json_io.hpp"
#include "trashfire/likelihood.hpp"
#include "trashfire/math/linalg.hpp"
#include "trashfire/math/quadrature.hpp"
#include "trashfire/math/special.hpp"
#include "trashfire/math/spline.hpp"
#include "trashfire/model.hpp"
#include "trashfire/optimize.hpp"
#include "trashfire/parse.hpp"
#include "trashfire/record.hpp"
#include "trashfire/report.hpp"
#include "trashfire/rng.hpp"
#include "trashfire/simulate.hpp"
#include "trashfire/svg.hpp"
#include "trashfire/validate.hpp"
