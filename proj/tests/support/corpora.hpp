#pragma once

// The fixed corpora shared by the acceptance suite and the bundled data/
// directory.

#include "synthetic.hpp"

namespace corpora {

struct Standard {
    synth::TaggedCorpus tag_train;
    synth::TaggedCorpus tag_test;
    synth::TaggedCorpus separable;
    synth::Treebank tree_train;
    synth::Treebank tree_test;
    synth::LabeledPoints mc_train;
    synth::LabeledPoints mc_test;
};

inline Standard standard() {
    const synth::TaggingGrammar grammar;
    const synth::TreebankModel treebank;
    return {
        grammar.sample(6000, 101),
        grammar.sample(2000, 202),
        synth::separable_tagging(500, 303),
        treebank.sample(800, 404, 0.25, 3, 12),
        treebank.sample(200, 505, 0.25, 3, 12),
        synth::gaussian_classes(600, 5, 30, 606),
        synth::gaussian_classes(200, 5, 30, 707),
    };
}

}  // namespace corpora
