#pragma once

#include "vdkit/abstract.hpp"
#include "vdkit/ast.hpp"
#include "vdkit/common.hpp"
#include "vdkit/dataflow.hpp"
#include "vdkit/dataset.hpp"
#include "vdkit/inference.hpp"
#include "vdkit/lexer.hpp"
#include "vdkit/metrics.hpp"
#include "vdkit/normalize.hpp"
#include "vdkit/parallel.hpp"
#include "vdkit/parser.hpp"
#include "vdkit/prompt.hpp"
#include "vdkit/rng.hpp"
#include "vdkit/slice.hpp"
#include "vdkit/source_function.hpp"
#include "vdkit/transform.hpp"
#include "vdkit/views.hpp"
