#pragma once

#include "hornindex/quadrature.hpp"
#include "hornindex/warp.hpp"
#include "hornindex/kernels.hpp"
#include "hornindex/spectral.hpp"
#include "hornindex/geometry.hpp"
#include "hornindex/channels.hpp"
#include "hornindex/index_formulas.hpp"
#include "hornindex/oracle.hpp"
#include "hornindex/homotopy.hpp"
#include "hornindex/report_io.hpp"
