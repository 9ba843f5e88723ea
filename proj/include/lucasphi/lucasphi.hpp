#pragma once

#include "lucasphi/arith.hpp"
#include "lucasphi/equation.hpp"
#include "lucasphi/errors.hpp"
#include "lucasphi/lemmas.hpp"
#include "lucasphi/lucas.hpp"
#include "lucasphi/report.hpp"
#include "lucasphi/search.hpp"
