#pragma once

#include "eur/bounds.hpp"
#include "eur/continuum.hpp"
#include "eur/entropy.hpp"
#include "eur/errors.hpp"
#include "eur/naimark.hpp"
#include "eur/povm.hpp"
#include "eur/spectrum.hpp"
#include "eur/states.hpp"
