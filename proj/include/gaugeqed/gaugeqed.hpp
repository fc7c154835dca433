#pragma once

#include "errors.hpp"
#include "operators.hpp"
#include "matter.hpp"
#include "gauge.hpp"
#include "two_level.hpp"
#include "observables.hpp"
#include "dispersive.hpp"
#include "perturbation.hpp"
#include "sweep.hpp"
