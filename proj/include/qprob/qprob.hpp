#pragma once

#include "qprob/constants.hpp"
#include "qprob/errors.hpp"
#include "qprob/ising.hpp"
#include "qprob/linalg.hpp"
#include "qprob/manybody.hpp"
#include "qprob/parallel.hpp"
#include "qprob/quasiprob.hpp"
#include "qprob/schemes.hpp"
#include "qprob/serialize.hpp"
#include "qprob/state.hpp"
#include "qprob/thermo.hpp"
