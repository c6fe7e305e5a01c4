// Writes synthetic corpora: a six-column treebank and raw text.
#include <CLI11.hpp>

#include <iostream>

#include "synthetic.h"
#include "sylpipe/annotation.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic annotated corpora"};
  int sentences = 50;
  int64_t words = 0;
  uint64_t seed = 1;
  bool example = false;
  std::string out_path;
  app.add_option("--sentences", sentences, "Treebank sentences")->capture_default_str();
  app.add_option("--raw-words", words, "Emit about this many words of raw text instead");
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_flag("--with-example", example, "Start the treebank with the example sentence");
  app.add_option("-o,--out", out_path, "Output file (default: stdout)");
  CLI11_PARSE(app, argc, argv);

  const std::string text =
      words > 0 ? sylpipe::synthetic::GenerateRawText(words, seed)
                : sylpipe::ToSixColumn(sylpipe::synthetic::GenerateTreebank(sentences, seed, example));
  try {
    if (out_path.empty()) {
      std::cout << text;
    } else {
      sylpipe::WriteFile(out_path, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
