#pragma once

#include "phmol/analytic.hpp"
#include "phmol/errors.hpp"
#include "phmol/fock.hpp"
#include "phmol/model.hpp"
#include "phmol/observables.hpp"
#include "phmol/solvers.hpp"
