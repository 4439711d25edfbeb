#pragma once

#include "rscompact/errors.hpp"
#include "rscompact/matkernel.hpp"
#include "rscompact/qh_double.hpp"
#include "rscompact/quantum.hpp"
#include "rscompact/rs_classical.hpp"
#include "rscompact/sampling.hpp"
#include "rscompact/verify.hpp"
