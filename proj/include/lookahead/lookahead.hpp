#pragma once

// Umbrella header.

#include "lookahead/bleu.hpp"
#include "lookahead/checkpoint.hpp"
#include "lookahead/common.hpp"
#include "lookahead/config.hpp"
#include "lookahead/corpus_io.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/evaluate.hpp"
#include "lookahead/grad_check.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/losses.hpp"
#include "lookahead/nn.hpp"
#include "lookahead/optimizer.hpp"
#include "lookahead/pipeline.hpp"
#include "lookahead/policy.hpp"
#include "lookahead/sentiment.hpp"
#include "lookahead/synthetic.hpp"
#include "lookahead/tensor.hpp"
#include "lookahead/tokenizer.hpp"
#include "lookahead/trainer.hpp"
#include "lookahead/vocabulary.hpp"
