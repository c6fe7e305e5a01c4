#include "synthetic.h"

#include <random>
#include <string_view>

namespace sylpipe::synthetic {
namespace {

struct Word {
  std::string_view form;
  std::string_view pos;
};

constexpr Word kTitles[] = {{"Ông", "Nc"}, {"Bà", "Nc"}, {"Anh", "Nc"}, {"Chị", "Nc"}, {"Cô", "Nc"}};
constexpr std::string_view kNames[] = {
    "Nguyễn_Khắc_Chúc", "Trần_Văn_Nam", "Lê_Thị_Hoa", "Phạm_Minh_Tuấn", "Hoàng_Văn_Thái",
    "Lan", "Võ_Thị_Mai", "Đặng_Quốc_Bảo", "Bùi_Thanh_Hà", "Ngô_Bảo_Châu", "Dũng", "Đỗ_Hùng"};
constexpr std::string_view kAux[] = {"đang", "đã", "sẽ", "cũng"};
constexpr std::string_view kVerbsAt[] = {"làm_việc", "học", "sống", "nghiên_cứu", "giảng_dạy"};
constexpr std::string_view kPreps[] = {"tại", "ở", "trong"};
constexpr std::string_view kMotion[] = {"đến", "về", "thăm", "rời"};
constexpr Word kSubjects[] = {{"học_sinh", "N"}, {"sinh_viên", "N"}, {"giáo_viên", "N"},
                              {"bác_sĩ", "N"},   {"kỹ_sư", "N"},     {"nông_dân", "N"}};
constexpr std::string_view kDets[] = {"Các", "Những", "Nhiều"};
constexpr std::string_view kTransitive[] = {"đọc", "viết", "mua", "xem", "cần", "bán"};
constexpr std::string_view kObjects[] = {"sách", "báo", "nhà", "xe_máy", "bài_tập", "máy_tính",
                                         "điện_thoại"};
constexpr std::string_view kAdjectives[] = {"mới", "cũ", "đẹp", "hay", "tốt"};
constexpr std::string_view kStudySubjects[] = {"sinh_học", "toán", "hoá_học", "văn", "lịch_sử"};

struct Entity {
  std::vector<Word> words;
};

const std::vector<Entity>& Organizations() {
  static const std::vector<Entity> orgs = {
      {{{"Đại_học", "N"}, {"Quốc_gia", "N"}, {"Hà_Nội", "Np"}}},
      {{{"Bộ", "N"}, {"Giáo_dục", "N"}}},
      {{{"Công_ty", "N"}, {"Vinamilk", "Np"}}},
      {{{"Viện", "N"}, {"Toán_học", "N"}}},
      {{{"Ngân_hàng", "N"}, {"Nhà_nước", "N"}}},
      {{{"Bệnh_viện", "N"}, {"Bạch_Mai", "Np"}}},
  };
  return orgs;
}

const std::vector<Entity>& Locations() {
  static const std::vector<Entity> locs = {
      {{{"Hà_Nội", "Np"}}},   {{{"Đà_Nẵng", "Np"}}},  {{{"Huế", "Np"}}},
      {{{"Cần_Thơ", "Np"}}},  {{{"Hải_Phòng", "Np"}}},
      {{{"thành_phố", "N"}, {"Hồ_Chí_Minh", "Np"}}},
  };
  return locs;
}

class Builder {
 public:
  int Add(std::string_view form, std::string_view pos, std::string_view ner = "O") {
    Token& t = s_.Add(std::string(form));
    t.pos_tag = std::string(pos);
    t.ner_label = std::string(ner);
    return t.index;
  }
  void Attach(int dependent, int head, std::string_view label) {
    Token& t = s_.tokens[dependent - 1];
    t.head = head;
    t.dep_label = std::string(label);
  }
  // Adds an entity; the first word heads the rest. Returns the first index.
  int AddEntity(const Entity& e, std::string_view type) {
    int first = 0;
    for (size_t i = 0; i < e.words.size(); ++i) {
      const std::string ner = (i == 0 ? "B-" : "I-") + std::string(type);
      const int idx = Add(e.words[i].form, e.words[i].pos, ner);
      if (i == 0) {
        first = idx;
      } else {
        Attach(idx, first, "nmod");
      }
    }
    return first;
  }
  Sentence Take() { return std::move(s_); }

 private:
  Sentence s_;
};

template <typename T, size_t N>
const T& Pick(const T (&items)[N], std::mt19937_64& rng) {
  return items[rng() % N];
}

template <typename T>
const T& Pick(const std::vector<T>& items, std::mt19937_64& rng) {
  return items[rng() % items.size()];
}

bool Chance(std::mt19937_64& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

// Title Name [Aux] Verb Prep Place .
Sentence PersonAtPlace(std::mt19937_64& rng) {
  Builder b;
  const int title = b.Add(Pick(kTitles, rng).form, "Nc");
  const int name = b.Add(Pick(kNames, rng), "Np", "B-PER");
  const int aux = Chance(rng, 70) ? b.Add(Pick(kAux, rng), "R") : 0;
  const int verb = b.Add(Pick(kVerbsAt, rng), "V");
  const int prep = b.Add(Pick(kPreps, rng), "E");
  const bool org = Chance(rng, 60);
  const int place = org ? b.AddEntity(Pick(Organizations(), rng), "ORG")
                        : b.AddEntity(Pick(Locations(), rng), "LOC");
  const int dot = b.Add(".", "CH");
  b.Attach(title, verb, "sub");
  b.Attach(name, title, "nmod");
  if (aux) b.Attach(aux, verb, "adv");
  b.Attach(verb, 0, "root");
  b.Attach(prep, verb, "loc");
  b.Attach(place, prep, "pob");
  b.Attach(dot, verb, "punct");
  return b.Take();
}

// Det Subject [Aux] Verb Object [Adj] .
Sentence SubjectVerbObject(std::mt19937_64& rng) {
  Builder b;
  const int det = b.Add(Pick(kDets, rng), "L");
  const int subj = b.Add(Pick(kSubjects, rng).form, "N");
  const int aux = Chance(rng, 50) ? b.Add(Pick(kAux, rng), "R") : 0;
  const int verb = b.Add(Pick(kTransitive, rng), "V");
  const int obj = b.Add(Pick(kObjects, rng), "N");
  const int adj = Chance(rng, 50) ? b.Add(Pick(kAdjectives, rng), "A") : 0;
  const int dot = b.Add(".", "CH");
  b.Attach(det, subj, "det");
  b.Attach(subj, verb, "sub");
  if (aux) b.Attach(aux, verb, "adv");
  b.Attach(verb, 0, "root");
  b.Attach(obj, verb, "dob");
  if (adj) b.Attach(adj, obj, "nmod");
  b.Attach(dot, verb, "punct");
  return b.Take();
}

// Det Subject [Aux] học Subject . -- "học_sinh học sinh_học" style ambiguity.
Sentence Study(std::mt19937_64& rng) {
  Builder b;
  const int det = b.Add(Pick(kDets, rng), "L");
  const int subj = b.Add(Pick(kSubjects, rng).form, "N");
  const int aux = Chance(rng, 50) ? b.Add(Pick(kAux, rng), "R") : 0;
  const int verb = b.Add("học", "V");
  const int obj = b.Add(Pick(kStudySubjects, rng), "N");
  const int dot = b.Add(".", "CH");
  b.Attach(det, subj, "det");
  b.Attach(subj, verb, "sub");
  if (aux) b.Attach(aux, verb, "adv");
  b.Attach(verb, 0, "root");
  b.Attach(obj, verb, "dob");
  b.Attach(dot, verb, "punct");
  return b.Take();
}

// Name [Aux] Motion Location .
Sentence Travel(std::mt19937_64& rng) {
  Builder b;
  const int name = b.Add(Pick(kNames, rng), "Np", "B-PER");
  const int aux = Chance(rng, 60) ? b.Add(Pick(kAux, rng), "R") : 0;
  const int verb = b.Add(Pick(kMotion, rng), "V");
  const int loc = b.AddEntity(Pick(Locations(), rng), "LOC");
  const int dot = b.Add(".", "CH");
  b.Attach(name, verb, "sub");
  if (aux) b.Attach(aux, verb, "adv");
  b.Attach(verb, 0, "root");
  b.Attach(loc, verb, "dob");
  b.Attach(dot, verb, "punct");
  return b.Take();
}

// Name nói tiếng_X , Name cũng verb Object .
Sentence Coordination(std::mt19937_64& rng) {
  Builder b;
  const int n1 = b.Add(Pick(kNames, rng), "Np", "B-PER");
  const int v1 = b.Add("nói", "V");
  const int o1 = b.Add(Chance(rng, 50) ? "tiếng_Việt" : "tiếng_Anh", "N", "B-MISC");
  const int comma = b.Add(",", "CH");
  const int n2 = b.Add(Pick(kNames, rng), "Np", "B-PER");
  const int adv = b.Add("cũng", "R");
  const int v2 = b.Add(Pick(kTransitive, rng), "V");
  const int o2 = b.Add(Pick(kObjects, rng), "N");
  const int dot = b.Add(".", "CH");
  b.Attach(n1, v1, "sub");
  b.Attach(v1, 0, "root");
  b.Attach(o1, v1, "dob");
  b.Attach(comma, v1, "punct");
  b.Attach(n2, v2, "sub");
  b.Attach(adv, v2, "adv");
  b.Attach(v2, v1, "coord");
  b.Attach(o2, v2, "dob");
  b.Attach(dot, v1, "punct");
  return b.Take();
}

}  // namespace

Sentence ExampleSentence() {
  Builder b;
  b.Add("Ông", "Nc");
  b.Add("Nguyễn_Khắc_Chúc", "Np", "B-PER");
  b.Add("đang", "R");
  b.Add("làm_việc", "V");
  b.Add("tại", "E");
  b.Add("Đại_học", "N", "B-ORG");
  b.Add("Quốc_gia", "N", "I-ORG");
  b.Add("Hà_Nội", "Np", "I-ORG");
  b.Add(".", "CH");
  const int heads[] = {4, 1, 4, 0, 4, 5, 6, 6, 4};
  const std::string_view labels[] = {"sub", "nmod", "adv", "root", "loc", "pob", "nmod", "nmod", "punct"};
  for (int i = 0; i < 9; ++i) b.Attach(i + 1, heads[i], labels[i]);
  return b.Take();
}

std::vector<Sentence> GenerateTreebank(int count, uint64_t seed, bool include_example) {
  std::mt19937_64 rng(seed);
  std::vector<Sentence> out;
  if (include_example && count > 0) out.push_back(ExampleSentence());
  while (static_cast<int>(out.size()) < count) {
    switch (rng() % 5) {
      case 0: out.push_back(PersonAtPlace(rng)); break;
      case 1: out.push_back(SubjectVerbObject(rng)); break;
      case 2: out.push_back(Study(rng)); break;
      case 3: out.push_back(Travel(rng)); break;
      default: out.push_back(Coordination(rng)); break;
    }
  }
  return out;
}

std::string Surface(const Sentence& sentence) {
  std::string out;
  for (const Token& t : sentence.tokens) {
    const bool punct = t.form == "." || t.form == ",";
    if (!out.empty() && !punct) out += ' ';
    for (char c : t.form) out += c == '_' ? ' ' : c;
  }
  return out;
}

std::string GenerateRawText(int64_t words, uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995);
  std::string out;
  int64_t produced = 0;
  int in_line = 0;
  uint64_t batch_seed = seed;
  while (produced < words) {
    for (const Sentence& s : GenerateTreebank(64, batch_seed++)) {
      if (produced >= words) break;
      if (in_line > 0) out += ' ';
      out += Surface(s);
      produced += static_cast<int64_t>(s.size());
      if (++in_line >= 3 + static_cast<int>(rng() % 5)) {
        out += '\n';
        in_line = 0;
      }
    }
  }
  if (in_line > 0) out += '\n';
  return out;
}

Sentence SplitNameSyllables(const Sentence& sentence) {
  Sentence out;
  for (const Token& t : sentence.tokens) {
    if (t.ner_or_outside() != "B-PER") {
      Token& copy = out.Add(t.form);
      copy.pos_tag = t.pos_tag;
      copy.ner_label = t.ner_label;
      continue;
    }
    bool first = true;
    for (const std::string& syl : SyllablesOf(t.form)) {
      Token& piece = out.Add(syl);
      piece.pos_tag = t.pos_tag;
      piece.ner_label = first ? "B-PER" : "I-PER";
      first = false;
    }
  }
  return out;
}

}  // namespace sylpipe::synthetic
