// Observed, chance and corrected F1 for the four simulation settings.

#include <cstdio>
#include <string>
#include <vector>

#include "seqagree/seqagree.hpp"

namespace {

seqagree::PlacedAnnotation from_bits(const std::string& bits, std::size_t& n) {
  std::vector<seqagree::Span> spans;
  n = 0;
  bool inside = false;
  for (char c : bits) {
    if (c != '0' && c != '1') continue;
    ++n;
    if (c == '1' && inside) ++spans.back().length;
    else if (c == '1') spans.push_back({n, 1});
    inside = c == '1';
  }
  return seqagree::PlacedAnnotation(std::move(spans));
}

struct Row {
  const char* label;
  const char* first;
  const char* second;
};

}  // namespace

int main() {
  const std::vector<Row> rows = {
      {"Sim1 CaseA", "00011000111000111100", "00111000111100111110"},
      {"Sim1 CaseB", "000110001110001111000000000000", "001110001111001111100000000000"},
      {"Sim2 CaseB", "00000011111111100000", "00001111111111110000"},
      {"Sim3 CaseA", "00000000111000000000", "00000000111100000000"},
      {"Sim4 annotator1", "11100111001110011100111001111111111111111",
       "11100111001110011100111000000000000000000"},
      {"Sim4 annotator2", "11100111001110011100111001111111111111111",
       "00000000000000000000000001111111111111111"},
  };
  std::printf("%-16s %8s %8s %8s %10s\n", "case", "observed", "chance", "corrected", "difficulty");
  for (const auto& row : rows) {
    std::size_t n = 0;
    const auto first = from_bits(row.first, n);
    const auto second = from_bits(row.second, n);
    const auto r = seqagree::agree(seqagree::SequenceSpec(n), first, second);
    std::printf("%-16s %8.4f %8.4f %8.4f %10.4f\n", row.label, r.observed_f1, r.chance_f1, *r.corrected_f1,
                *r.difficulty);
  }
}
