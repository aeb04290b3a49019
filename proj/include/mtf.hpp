#pragma once

#include "mtf/atom_config.hpp"
#include "mtf/energy.hpp"
#include "mtf/minimizer.hpp"
#include "mtf/momentum_functional.hpp"
#include "mtf/position_functional.hpp"
#include "mtf/profile_io.hpp"
#include "mtf/radial.hpp"
#include "mtf/random_profiles.hpp"
#include "mtf/tf_ode.hpp"
#include "mtf/transforms.hpp"
#include "mtf/verify.hpp"
