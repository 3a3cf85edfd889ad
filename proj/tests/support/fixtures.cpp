#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tabrecon/error.hpp"

namespace tabrecon::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fixture_path(std::string_view relative) { return fs::path(TABRECON_FIXTURE_DIR) / relative; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_fixture(std::string_view relative) { return read_file(fixture_path(relative)); }

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (;;) {
    fs::path candidate = fs::temp_directory_path() /
                         ("tabrecon-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
    if (fs::create_directory(candidate)) {
      path_ = std::move(candidate);
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : responses_(std::make_move_iterator(responses.begin()), std::make_move_iterator(responses.end())) {}

std::string ScriptedBackend::complete(std::string_view prompt, std::size_t) {
  std::lock_guard lock(mutex_);
  prompts_.emplace_back(prompt);
  if (responses_.empty()) throw Error(Errc::transport, "script exhausted");
  std::string next = std::move(responses_.front());
  responses_.pop_front();
  return next;
}

std::vector<std::string> ScriptedBackend::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return responses_.size();
}

std::string extraction_response(const std::vector<ResponsePart>& parts) {
  json tables = json::array();
  for (const ResponsePart& p : parts) {
    tables.push_back(json{{"starting_token", p.starting_token.empty() ? json(nullptr) : json(p.starting_token)},
                          {"html_output", serialize_html(p.table)}});
  }
  return "```json\n" + json{{"tables", tables}, {"row_delimiter", "\\n"}}.dump(2) + "\n```";
}

std::string extraction_response(const Table& t) { return extraction_response({ResponsePart{"", t}}); }

namespace {

std::vector<std::vector<std::string>> rows_of(const json& j) {
  std::vector<std::vector<std::string>> rows;
  for (const json& r : j) rows.push_back(r.get<std::vector<std::string>>());
  return rows;
}

}  // namespace

std::vector<CorpusFixture> load_checker_corpus() {
  const json doc = json::parse(read_fixture("checker_corpus.json"));
  std::vector<CorpusFixture> out;
  for (const json& f : doc) {
    CorpusFixture fx;
    fx.name = f.at("name").get<std::string>();
    fx.table = normalize_rectangular(make_table(rows_of(f.value("header", json::array())), rows_of(f.at("body"))));
    fx.source = f.contains("source") ? SourceText(f.at("source").get<std::string>())
                                     : flatten_table(fx.table, FlattenStyle::ocr);
    for (const json& r : f.at("expected")) fx.expected_rules.insert(r.get<std::string>());
    out.push_back(std::move(fx));
  }
  return out;
}

std::set<std::string> reported_rules(const ValidationReport& report) {
  std::set<std::string> out;
  for (const Violation& v : report.violations) out.emplace(rule_name(v.rule));
  return out;
}

Table load_html_fixture(std::string_view relative) {
  return normalize_rectangular(parse_html_table(read_fixture(relative)));
}

namespace {

Table slice_body(const Table& t, std::size_t begin, std::size_t end) {
  Table out;
  out.header_rows = t.header_rows;
  out.body_rows.assign(t.body_rows.begin() + static_cast<std::ptrdiff_t>(begin),
                       t.body_rows.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t r = 0; r < out.body_rows.size(); ++r) {
    for (Cell& c : out.body_rows[r]) c.row = r;
  }
  out.width = t.width;
  return out;
}

}  // namespace

std::string balance_sheet_response() {
  const Table gold = load_html_fixture("paired/balance_sheet/gold.html");
  std::size_t split = 0;
  while (split < gold.body_rows.size() && gold.body_rows[split].front().text != "EQUITY AND LIABILITIES") ++split;
  return extraction_response({ResponsePart{"A ASSETS", slice_body(gold, 0, split)},
                              ResponsePart{"EQUITY AND LIABILITIES", slice_body(gold, split, gold.body_rows.size())}});
}

void record_paired_store(const fs::path& store_dir, const BackendConfig& cfg) {
  const std::string balance_input = read_fixture("paired/balance_sheet/input.txt");
  const std::string go_input = read_fixture("paired/go_enrichment/input.txt");
  const std::string balance = balance_sheet_response();
  const std::string go = read_fixture("transcripts/go_enrichment.json");

  auto scripted = std::make_shared<FunctionBackend>([&](std::string_view prompt, std::size_t) -> std::string {
    if (prompt.find(balance_input) != std::string_view::npos) return balance;
    if (prompt.find(go_input) != std::string_view::npos) return go;
    throw Error(Errc::transport, "no scripted answer for prompt");
  });
  auto store = std::make_shared<TranscriptStore>(store_dir);
  RecordingBackend recorder(scripted, store, cfg);
  for (const std::string* input : {&balance_input, &go_input}) {
    recorder.complete(render_prompt(PromptKind::structural_decomposition, {{"input_text", *input}}));
  }
}

TwoStepScenario two_step_scenario() {
  TwoStepScenario s;
  s.source = SourceText("Sample Count A Count B\r\nS1 102 205\r\nS2 98 187");
  s.merged = normalize_rectangular(
      make_table({{"Sample", "Count A", "Count B"}}, {{"S1", "102, 205", ""}, {"S2", "98, 187", ""}}));
  s.fixed = normalize_rectangular(
      make_table({{"Sample", "Count A", "Count B"}}, {{"S1", "102", "205"}, {"S2", "98", "187"}}));
  s.critique =
      "The Count A column holds two numbers per row (\"102, 205\" and \"98, 187\") while Count B is empty. "
      "Split each pair: the first number belongs to Count A, the second to Count B.";
  return s;
}

}  // namespace tabrecon::testing
