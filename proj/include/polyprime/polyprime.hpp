#pragma once

#include "polyprime/error.hpp"
#include "polyprime/resources.hpp"
#include "polyprime/parallel.hpp"
#include "polyprime/sieve.hpp"
#include "polyprime/polynomial.hpp"
#include "polyprime/fft.hpp"
#include "polyprime/counting.hpp"
#include "polyprime/asymptotics.hpp"
#include "polyprime/diagnostics.hpp"
