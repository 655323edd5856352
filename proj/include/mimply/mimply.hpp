#pragma once

#include "mimply/formula.hpp"
#include "mimply/bitstring.hpp"
#include "mimply/derivation.hpp"
#include "mimply/emnd.hpp"
#include "mimply/search.hpp"
#include "mimply/redundancy.hpp"
#include "mimply/rdag.hpp"
#include "mimply/pipeline.hpp"
#include "mimply/checker.hpp"
#include "mimply/oracle.hpp"
#include "mimply/io.hpp"
