#pragma once

// Umbrella header for the header-only part of the toolkit.

#include "bkc/errors.hpp"
#include "bkc/numerics.hpp"
#include "bkc/parallel.hpp"
#include "bkc/chain_model.hpp"
#include "bkc/spectra.hpp"
#include "bkc/response.hpp"
#include "bkc/thermal.hpp"
#include "bkc/sensing.hpp"
#include "bkc/optomech.hpp"
#include "bkc/tones.hpp"
#include "bkc/nonlinear.hpp"
#include "bkc/io.hpp"
