#pragma once

#include "dendrolab/rational.hpp"
#include "dendrolab/error.hpp"
#include "dendrolab/random.hpp"
#include "dendrolab/dendrite.hpp"
#include "dendrolab/subdendrite.hpp"
#include "dendrolab/hyperspace.hpp"
#include "dendrolab/fullness.hpp"
#include "dendrolab/builder.hpp"
#include "dendrolab/chain.hpp"
#include "dendrolab/back_and_forth.hpp"
#include "dendrolab/nerve.hpp"
#include "dendrolab/io.hpp"
