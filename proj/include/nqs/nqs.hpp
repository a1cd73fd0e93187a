#pragma once

#include "nqs/error.hpp"
#include "nqs/parallel.hpp"
#include "nqs/spinspace.hpp"
#include "nqs/profile.hpp"
#include "nqs/constants.hpp"
#include "nqs/rbm.hpp"
#include "nqs/bounds.hpp"
#include "nqs/lrfd.hpp"
#include "nqs/hamiltonian.hpp"
#include "nqs/exact.hpp"
#include "nqs/lanczos.hpp"
#include "nqs/vmc.hpp"
#include "nqs/io.hpp"
#include "nqs/presets.hpp"
#include "nqs/experiments.hpp"
