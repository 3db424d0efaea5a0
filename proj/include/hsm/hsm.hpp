#pragma once

#include "hsm/constants.hpp"
#include "hsm/corpus.hpp"
#include "hsm/domain_io.hpp"
#include "hsm/error.hpp"
#include "hsm/forms.hpp"
#include "hsm/geometry.hpp"
#include "hsm/grid.hpp"
#include "hsm/io.hpp"
#include "hsm/oned_lab.hpp"
#include "hsm/operators.hpp"
#include "hsm/parallel.hpp"
#include "hsm/spectral.hpp"
#include "hsm/sphere_weight.hpp"
