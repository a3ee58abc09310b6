#ifndef THERMOSPEC_THERMOSPEC_HPP
#define THERMOSPEC_THERMOSPEC_HPP

#include "thermospec/errors.hpp"
#include "thermospec/evolution.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/least_squares.hpp"
#include "thermospec/parallel.hpp"
#include "thermospec/resolvent.hpp"
#include "thermospec/spectral_basis.hpp"
#include "thermospec/stability.hpp"

#endif  // THERMOSPEC_THERMOSPEC_HPP
