#pragma once

#include "coorbital/cc_system.hpp"
#include "coorbital/certify.hpp"
#include "coorbital/distance_form.hpp"
#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"
#include "coorbital/interval.hpp"
#include "coorbital/parallel.hpp"
#include "coorbital/solvers.hpp"
#include "coorbital/stability.hpp"

namespace coorbital {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace coorbital
