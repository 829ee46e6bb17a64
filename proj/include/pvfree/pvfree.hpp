#pragma once

#include "pvfree/errors.hpp"
#include "pvfree/quadrature.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/special_functions.hpp"
#include "pvfree/parallel.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/matsubara_oracles.hpp"
#include "pvfree/printed_forms.hpp"
#include "pvfree/fields.hpp"
#include "pvfree/free_energy.hpp"
#include "pvfree/io.hpp"
