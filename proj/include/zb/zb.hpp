#pragma once

#include "zb/config.hpp"
#include "zb/algebra.hpp"
#include "zb/spectrum.hpp"
#include "zb/wavepacket.hpp"
#include "zb/dynamics.hpp"
#include "zb/spectral.hpp"
#include "zb/verify.hpp"
#include "zb/io.hpp"
