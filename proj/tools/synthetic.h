#ifndef SYLPIPE_TOOLS_SYNTHETIC_H_
#define SYLPIPE_TOOLS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sylpipe/annotation.h"

// Template-generated Vietnamese-like sentences with full annotations: word
// segmentation, POS tags, BIO entities and projective dependency trees.
namespace sylpipe::synthetic {

// The fully annotated example sentence "Ông Nguyễn_Khắc_Chúc đang làm_việc
// tại Đại_học Quốc_gia Hà_Nội ."
Sentence ExampleSentence();

// `count` sentences drawn with `seed`. When `include_example` is set the
// first sentence is ExampleSentence().
std::vector<Sentence> GenerateTreebank(int count, uint64_t seed, bool include_example = false);

// Plain text for a sentence: words split back into syllables, punctuation
// attached to the preceding syllable.
std::string Surface(const Sentence& sentence);

// Roughly `words` word tokens of raw text, several sentences per line.
std::string GenerateRawText(int64_t words, uint64_t seed);

// Splits a fully annotated name into per-syllable B-PER/I-PER tokens, the
// shape of NER corpora before name merging.
Sentence SplitNameSyllables(const Sentence& sentence);

}  // namespace sylpipe::synthetic

#endif  // SYLPIPE_TOOLS_SYNTHETIC_H_
