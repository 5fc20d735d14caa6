#pragma once

// Chance-corrected agreement for span annotation.

#include "types.hpp"
#include "count.hpp"
#include "combinatorics.hpp"
#include "agreement.hpp"
#include "rng.hpp"
#include "oracle.hpp"
#include "conll.hpp"
#include "corpus.hpp"
#include "report.hpp"
