#pragma once

#include "dkp/assembly.hpp"
#include "dkp/eigenfunction.hpp"
#include "dkp/error.hpp"
#include "dkp/gaussian_series.hpp"
#include "dkp/grid.hpp"
#include "dkp/io.hpp"
#include "dkp/kummer.hpp"
#include "dkp/ladder.hpp"
#include "dkp/params.hpp"
#include "dkp/profile.hpp"
#include "dkp/quantization.hpp"
#include "dkp/spectra.hpp"
#include "dkp/verification.hpp"
