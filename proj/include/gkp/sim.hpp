#pragma once
// Simulation front door: the grid/Fourier backend and the exact Gaussian-sum
// backend for hybrid qubit-oscillator states.

#include "gauss_backend.hpp"
#include "grid.hpp"
