#pragma once

#include "nullring/base_set.hpp"
#include "nullring/caps.hpp"
#include "nullring/dimension.hpp"
#include "nullring/dyadic.hpp"
#include "nullring/errors.hpp"
#include "nullring/expansion.hpp"
#include "nullring/json_io.hpp"
#include "nullring/ring.hpp"
#include "nullring/sumset.hpp"
