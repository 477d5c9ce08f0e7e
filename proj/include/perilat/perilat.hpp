#pragma once

#include "perilat/dft.hpp"
#include "perilat/errors.hpp"
#include "perilat/experiment.hpp"
#include "perilat/freqset.hpp"
#include "perilat/lattice.hpp"
#include "perilat/rng.hpp"
#include "perilat/spectral.hpp"
#include "perilat/transform.hpp"
