#pragma once

// Umbrella header: geodesic-flower search on model manifolds with finite
// volume and cusp-like ends. Include this to get the whole library.

#include "flowerbed/errors.hpp"
#include "flowerbed/linalg.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/geodesics.hpp"
#include "flowerbed/nets.hpp"
#include "flowerbed/shortening.hpp"
#include "flowerbed/slicing.hpp"
#include "flowerbed/bounds.hpp"
#include "flowerbed/seeds.hpp"
#include "flowerbed/serialize.hpp"
#include "flowerbed/svg.hpp"
#include "flowerbed/config.hpp"
#include "flowerbed/runner.hpp"
