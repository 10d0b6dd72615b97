#pragma once

#include "mstwave/core_model.hpp"
#include "mstwave/dwell.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/greens.hpp"
#include "mstwave/grid_oracle.hpp"
#include "mstwave/packet.hpp"
#include "mstwave/quadrature.hpp"
#include "mstwave/scattering.hpp"
#include "mstwave/scenario.hpp"
#include "mstwave/wavepacket.hpp"
