// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header for the whole library.

#include "plrev/certificate.hpp"
#include "plrev/error.hpp"
#include "plrev/factorization.hpp"
#include "plrev/json_io.hpp"
#include "plrev/lazymap.hpp"
#include "plrev/parse.hpp"
#include "plrev/plmap.hpp"
#include "plrev/reversibility.hpp"
#include "plrev/scalar.hpp"
#include "plrev/signature.hpp"
#include "plrev/verifier.hpp"
