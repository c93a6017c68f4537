#pragma once

#include "nes/blurred_lt.hpp"
#include "nes/constants.hpp"
#include "nes/effective_dimension.hpp"
#include "nes/errors.hpp"
#include "nes/kinematics.hpp"
#include "nes/loop.hpp"
#include "nes/quadrature.hpp"
#include "nes/verify.hpp"
