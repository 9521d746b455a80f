#pragma once

#include "icmup/alignment/decode.hpp"
#include "icmup/alignment/multiple_alignment.hpp"
#include "icmup/alignment/pairwise.hpp"
#include "icmup/alignment/render.hpp"
#include "icmup/alignment/search.hpp"
#include "icmup/codecs/chunking.hpp"
#include "icmup/codecs/encoded_stream.hpp"
#include "icmup/codecs/run_length.hpp"
#include "icmup/codecs/schema.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/report.hpp"
#include "icmup/segmentation.hpp"
#include "icmup/symbol.hpp"
