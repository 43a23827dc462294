// Copyright 2026 The ExecEdit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "e2e_fixture.hpp"
#include "execedit/benchmark_builder.hpp"
#include "execedit/detection_harness.hpp"
#include "execedit/edit_synthesis.hpp"
#include "execedit/error.hpp"
#include "execedit/explanation_judge.hpp"
#include "execedit/explanation_taxonomy.hpp"
#include "execedit/mock_backend.hpp"
#include "execedit/triviality_filter.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace execedit {
namespace {

template <typename F>
ErrorCode CodeOf(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::kInvalidArgument;
}

ExecutableEdit MakeEdit(std::string original, std::string replace) {
  ExecutableEdit e;
  e.doc_id = "d1";
  e.summary_id = "m1";
  e.original_text = std::move(original);
  e.replace_text = std::move(replace);
  e.explanation = "because";
  e.generator_model = "gen";
  e.edit_id = MakeEditId(e.doc_id, e.original_text, e.replace_text, e.generator_model);
  return e;
}

const SeedSummary kSeed{"m1", "d1", "The cat sat on the mat. The cat slept."};

struct Fixture {
  std::shared_ptr<MockBackend> mock = std::make_shared<MockBackend>();
  Gateway gateway{[] {
    GatewayOptions o;
    o.initial_backoff = std::chrono::milliseconds(0);
    return o;
  }()};
  TemplateLibrary library = TemplateLibrary::Builtin();
  Fixture() { gateway.RegisterBackend("mock", mock); }
};

// ---------------------------------------------------------------------------
// edits

TEST(EditTest, ValidationStatusOrder) {
  EXPECT_EQ(ValidateEdit(kSeed, MakeEdit("", "x")).status, EditStatus::kEmptyField);
  EXPECT_EQ(ValidateEdit(kSeed, MakeEdit("mat", "")).status, EditStatus::kEmptyField);
  EXPECT_EQ(ValidateEdit(kSeed, MakeEdit("dog", "dog")).status, EditStatus::kIdentityEdit);
  EXPECT_EQ(ValidateEdit(kSeed, MakeEdit("dog", "cow")).status, EditStatus::kSubstringMissing);
  const auto v = ValidateEdit(kSeed, MakeEdit("The cat", "A dog"));
  EXPECT_EQ(v.status, EditStatus::kValid);
  EXPECT_EQ(v.occurrence_count, 2u);
}

TEST(EditTest, ApplyReplacesFirstOccurrenceOnly) {
  EXPECT_EQ(ApplyEdit(kSeed, MakeEdit("The cat", "A dog")),
            "A dog sat on the mat. The cat slept.");
  EXPECT_EQ(CodeOf([] { ApplyEdit(kSeed, MakeEdit("dog", "cow")); }), ErrorCode::kInvalidEdit);
}

TEST(EditTest, DedupeKeepsFirst) {
  auto a = MakeEdit("mat", "rug");
  auto b = MakeEdit("mat", "rug");
  b.explanation = "other";
  auto c = MakeEdit("mat", "bed");
  const auto out = DedupeEdits({a, b, c});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].explanation, "because");
  EXPECT_EQ(out[1].replace_text, "bed");
}

TEST(EditTest, PrepareDropsInvalidWarnsAndDedupes) {
  const auto out = PrepareEdits(
      kSeed, {MakeEdit("mat", "rug"), MakeEdit("dog", "cow"), MakeEdit("mat", "rug"),
              MakeEdit("The cat", "A dog")});
  ASSERT_EQ(out.edits.size(), 2u);
  std::multiset<std::string> kinds;
  for (const auto& e : out.events) kinds.insert(e.kind);
  EXPECT_EQ(kinds.count("invalid_edit"), 1u);
  EXPECT_EQ(kinds.count("duplicate_edit"), 1u);
  EXPECT_EQ(kinds.count("multi_occurrence"), 1u);
}

TEST(EditTest, SpanAndDiffSpanAgree) {
  const auto e = MakeEdit("mat", "sofa");
  const EditSpan s = SpanOf(kSeed, e);
  EXPECT_EQ(s, (EditSpan{19, 3, 19, 4}));
  EXPECT_EQ(DiffSpan(kSeed.text, ApplyEdit(kSeed, e)), s);
}

TEST(EditTest, DiffSpanRespectsUtf8Boundaries) {
  // é (C3 A9) vs è (C3 A8) share a lead byte; the span must cover the whole
  // code point.
  const EditSpan s = DiffSpan("caf\xC3\xA9 noir", "caf\xC3\xA8 noir");
  EXPECT_EQ(s.original_begin, 3u);
  EXPECT_EQ(s.original_length, 2u);
  EXPECT_EQ(s.replace_length, 2u);
}

TEST(GenerateTest, ExecutableEditsFromReply) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text(R"({"edits": [
      {"original_text": "mat", "replace_text": "rug", "explanation": "x"},
      {"original_text": "slept", "replace_text": "ran", "explanation": "y"},
      {"edited_summary": "wrong shape"}]})"));
  const DocumentRecord doc{"d1", "News", "A cat."};
  const auto r = GenerateEdits(f.gateway, f.library, doc, kSeed, EditMode::kExecutable,
                               {"mock", "gen-model"});
  ASSERT_EQ(r.executable.size(), 2u);
  EXPECT_EQ(r.executable[0].generator_model, "gen-model");
  EXPECT_EQ(r.executable[0].edit_id, MakeEditId("d1", "mat", "rug", "gen-model"));
  std::set<std::string> kinds;
  for (const auto& e : r.events) kinds.insert(e.kind);
  EXPECT_TRUE(kinds.contains("malformed_edit"));
  EXPECT_TRUE(kinds.contains("short_output"));
  const auto req = f.mock->requests().at(0);
  EXPECT_EQ(req.temperature, kGenerationTemperature);
  EXPECT_NE(req.prompt.find(kSeed.text), std::string::npos);
}

TEST(GenerateTest, ExtraEditsAreTruncated) {
  Fixture f;
  Json edits = Json::array();
  for (int i = 0; i < 8; ++i) {
    edits.push_back({{"original_text", "mat"}, {"replace_text", "r" + std::to_string(i)},
                     {"explanation", "e"}});
  }
  f.mock->SetDefault(ScriptedReply::Text(Json{{"edits", edits}}.dump()));
  const auto r = GenerateEdits(f.gateway, f.library, {"d1", "News", "doc"}, kSeed,
                               EditMode::kExecutable, {"mock", "g"});
  EXPECT_EQ(r.executable.size(), kEditsPerPair);
  EXPECT_EQ(r.events.at(0).kind, "extra_edits");
}

TEST(GenerateTest, ReaskThenFailure) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text("I cannot do that."));
  const auto r = GenerateEdits(f.gateway, f.library, {"d1", "News", "doc"}, kSeed,
                               EditMode::kExecutable, {"mock", "g"});
  EXPECT_TRUE(r.executable.empty());
  EXPECT_TRUE(r.transcript.reasked);
  EXPECT_EQ(f.mock->calls(), 2);
  ASSERT_FALSE(r.events.empty());
  EXPECT_EQ(r.events[0].kind, "generation_failure");
}

TEST(GenerateTest, NonExecutableRejectsUnchangedRewrite) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text(Json{{"edits", {{{"edited_summary", kSeed.text},
                                                          {"explanation", "x"}},
                                                         {{"edited_summary", "The dog sat."},
                                                          {"explanation", "y"}}}}}
                                             .dump()));
  const auto r = GenerateEdits(f.gateway, f.library, {"d1", "News", "doc"}, kSeed,
                               EditMode::kNonExecutable, {"mock", "g"});
  ASSERT_EQ(r.non_executable.size(), 1u);
  EXPECT_EQ(r.non_executable[0].edited_summary, "The dog sat.");
}

// ---------------------------------------------------------------------------
// triviality

TEST(TrivialityTest, ParseCategories) {
  std::string warning;
  EXPECT_EQ(ParseTrivialityCategory(R"({"category": "date_change"})", &warning),
            TrivialityCategory::kDateChange);
  EXPECT_EQ(ParseTrivialityCategory(R"({"category": "ANTONYM_CHANGE"})", &warning),
            TrivialityCategory::kAntonymChange);
  EXPECT_TRUE(warning.empty());
  EXPECT_EQ(ParseTrivialityCategory(R"({"category": "SYNONYM"})", &warning),
            TrivialityCategory::kOther);
  EXPECT_FALSE(warning.empty());
  EXPECT_EQ(CodeOf([&] { ParseTrivialityCategory("none", &warning); }), ErrorCode::kUnparsable);
}

TEST(TrivialityTest, UnparsableAfterReaskIsKeptAndFlagged) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text("hmm"));
  const auto o = ClassifyEdit(f.gateway, f.library, MakeEdit("mat", "rug"), {"mock", "c"});
  EXPECT_EQ(o.category, TrivialityCategory::kOther);
  EXPECT_TRUE(o.flagged);
  EXPECT_EQ(o.raw.size(), 2u);
  EXPECT_EQ(f.mock->requests().at(0).temperature, kEvaluationTemperature);
}

TEST(TrivialityTest, FilterKeepsOtherInOrder) {
  const auto a = MakeEdit("mat", "rug");
  const auto b = MakeEdit("mat", "bed");
  const auto c = MakeEdit("cat", "dog");
  const auto kept = FilterTrivial({{a, TrivialityCategory::kOther},
                                   {b, TrivialityCategory::kNumberChange},
                                   {c, TrivialityCategory::kOther}});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].edit_id, a.edit_id);
  EXPECT_EQ(kept[1].edit_id, c.edit_id);
}

// ---------------------------------------------------------------------------
// benchmark builder

TEST(BuilderTest, ConsistentCount) {
  EXPECT_EQ(ConsistentCountFor(420, 0.5, 1000), 420u);
  EXPECT_EQ(ConsistentCountFor(300, 0.6, 1000), 200u);
  EXPECT_EQ(ConsistentCountFor(420, 0.5, 419), 419u);  // within 1/total
  EXPECT_EQ(CodeOf([] { ConsistentCountFor(420, 0.5, 300); }),
            ErrorCode::kInsufficientConsistentPool);
  EXPECT_EQ(CodeOf([] { ConsistentCountFor(0, 0.5, 10); }), ErrorCode::kEmptyInput);
}

TEST(BuilderTest, SeededPermutationIsDeterministicPermutation) {
  const auto a = SeededPermutation(50, 7);
  EXPECT_EQ(a, SeededPermutation(50, 7));
  EXPECT_NE(a, SeededPermutation(50, 8));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

TEST(BuilderTest, RoundHalfUp) {
  EXPECT_EQ(RoundHalfUp(2.675, 2), 2.68);
  EXPECT_EQ(RoundHalfUp(45.4285714, 1), 45.4);
  EXPECT_EQ(RoundHalfUp(0.5, 0), 1.0);
}

TEST(BuilderTest, AssembleSmallCorpus) {
  const e2e::Corpus c = e2e::MakeCorpus();
  std::vector<ExecutableEdit> edits;
  for (int p = 0; p < 10; ++p) {
    for (int j = 0; j < 3; ++j) {
      ExecutableEdit e;
      e.doc_id = c.seeds[p].doc_id;
      e.summary_id = c.seeds[p].summary_id;
      e.original_text = e2e::Fact(p, j);
      e.replace_text = "changed " + std::to_string(j);
      e.explanation = "ref " + std::to_string(j);
      e.generator_model = "g";
      e.edit_id = MakeEditId(e.doc_id, e.original_text, e.replace_text, "g");
      edits.push_back(e);
    }
  }
  const auto samples = AssembleBenchmark(GroupByPair(edits), c.seeds, c.documents, c.pool,
                                         {0.5, 2, 11});
  std::size_t inconsistent = 0;
  std::map<std::string, SeedSummary> seed_of;
  for (const auto& s : c.seeds) seed_of[s.summary_id] = s;
  for (const auto& s : c.pool) seed_of[s.summary_id] = s;
  for (const auto& s : samples) {
    if (s.label == Label::kInconsistent) {
      ++inconsistent;
      EXPECT_EQ(s.reference_explanation, s.edit->explanation);
    }
    EXPECT_TRUE(ValidateSample(s, seed_of.at(s.summary_id)).ok()) << s.sample_id;
  }
  EXPECT_EQ(inconsistent, 20u);  // cap 2 of 3 per pair
  EXPECT_EQ(samples.size(), 40u);
  EXPECT_TRUE(ValidateUniqueIds(samples).ok());
  EXPECT_EQ(samples, AssembleBenchmark(GroupByPair(edits), c.seeds, c.documents, c.pool,
                                       {0.5, 2, 11}));
}

TEST(BuilderTest, AssembleErrors) {
  const e2e::Corpus c = e2e::MakeCorpus();
  ExecutableEdit e;
  e.doc_id = "d000";
  e.summary_id = "m000";
  e.original_text = e2e::Fact(0, 0);
  e.replace_text = "x";
  e.explanation = "why";
  e.edit_id = "e";
  EXPECT_EQ(CodeOf([&] { AssembleBenchmark({}, c.seeds, c.documents, c.pool, {}); }),
            ErrorCode::kEmptyInput);
  EXPECT_EQ(CodeOf([&] { AssembleBenchmark(GroupByPair({e}), c.seeds, c.documents, {}, {}); }),
            ErrorCode::kInsufficientConsistentPool);
  EXPECT_EQ(CodeOf([&] {
              AssembleBenchmark(GroupByPair({e}), c.seeds, c.documents, c.pool, {1.5, 2, 0});
            }),
            ErrorCode::kInvalidArgument);
  auto bad = c.pool;
  bad[0].text = ApplyEdit(c.seeds[0], e);
  EXPECT_EQ(CodeOf([&] { AssembleBenchmark(GroupByPair({e}), c.seeds, c.documents, bad, {}); }),
            ErrorCode::kInvalidArgument);
  e.original_text = "absent";
  EXPECT_EQ(CodeOf([&] { AssembleBenchmark(GroupByPair({e}), c.seeds, c.documents, c.pool, {}); }),
            ErrorCode::kInvalidEdit);
}

TEST(BuilderTest, DomainStats) {
  std::vector<BenchmarkSample> samples;
  auto add = [&](std::string domain, Label label) {
    BenchmarkSample s;
    s.domain = std::move(domain);
    s.label = label;
    samples.push_back(s);
  };
  add("B", Label::kInconsistent);
  add("A", Label::kConsistent);
  add("B", Label::kConsistent);
  add("A", Label::kConsistent);
  add("B", Label::kInconsistent);
  const DomainStats stats = ComputeDomainStats(samples);
  ASSERT_EQ(stats.rows.size(), 2u);
  EXPECT_EQ(stats.rows[0], (DomainStatsRow{"B", 3, 2, 66.67}));
  EXPECT_EQ(stats.rows[1], (DomainStatsRow{"A", 2, 0, 0.0}));
  EXPECT_EQ(stats.total, (DomainStatsRow{"Total", 5, 2, 40.0}));
  EXPECT_EQ(DomainStatsToJson(stats)["total"]["n"], 5);
}

// ---------------------------------------------------------------------------
// detection

TEST(DetectionParseTest, DetectAndExplain) {
  auto p = ParseDetectionResponse(R"({"consistent":"No","explanation":"x"})",
                                  PromptKind::kDetectAndExplain);
  EXPECT_EQ(p.verdict, Verdict::kInconsistent);
  EXPECT_EQ(p.explanation, "x");
  p = ParseDetectionResponse(R"({"consistent": " yes ", "explanation": ""})",
                             PromptKind::kDetectAndExplain);
  EXPECT_EQ(p.verdict, Verdict::kConsistent);
  p = ParseDetectionResponse(R"({"consistent":"maybe","explanation":"because"})",
                             PromptKind::kDetectAndExplain);
  EXPECT_EQ(p.verdict, Verdict::kUnparsable);
  EXPECT_FALSE(p.explanation.has_value());
  EXPECT_EQ(ParseDetectionResponse("No.", PromptKind::kDetectAndExplain).verdict,
            Verdict::kUnparsable);
  EXPECT_EQ(ParseDetectionResponse(R"({"consistent": true})", PromptKind::kDetectAndExplain)
                .verdict,
            Verdict::kUnparsable);
}

TEST(DetectionParseTest, ExplainGivenDetection) {
  auto p = ParseDetectionResponse(R"({"explanation": "The summary says 2010."})",
                                  PromptKind::kExplainGivenDetection);
  EXPECT_EQ(p.verdict, Verdict::kInconsistent);
  EXPECT_EQ(p.explanation, "The summary says 2010.");
  p = ParseDetectionResponse("{}", PromptKind::kExplainGivenDetection);
  EXPECT_EQ(p.verdict, Verdict::kInconsistent);
  EXPECT_EQ(p.explanation, "");
  EXPECT_EQ(ParseDetectionResponse("nothing", PromptKind::kExplainGivenDetection).verdict,
            Verdict::kUnparsable);
}

std::vector<BenchmarkSample> TwoSamples() {
  BenchmarkSample a;
  a.sample_id = "s_inc";
  a.doc_id = "d1";
  a.summary_id = "m1";
  a.domain = "News";
  a.label = Label::kInconsistent;
  a.edit = MakeEdit("mat", "rug");
  a.summary_text = "The cat sat on the rug. The cat slept.";
  a.reference_explanation = "REFERENCE_SENTINEL";
  BenchmarkSample b;
  b.sample_id = "s_con";
  b.doc_id = "d1";
  b.summary_id = "m1";
  b.domain = "News";
  b.summary_text = kSeed.text;
  return {a, b};
}

TEST(DetectionTest, EvaluateSubmitsByKindWithoutReask) {
  Fixture f;
  f.mock->ScriptTag("detect:D_AND_E:s_inc", {ScriptedReply::Text(R"({"consistent":"no","explanation":"rug"})")});
  f.mock->ScriptTag("detect:D_AND_E:s_con", {ScriptedReply::Text("garbage")});
  f.mock->ScriptTag("detect:E_GIVEN_D:s_inc", {ScriptedReply::Permanent()});
  const std::map<std::string, DocumentRecord> docs{{"d1", {"d1", "News", "A cat on a mat."}}};
  const auto samples = TwoSamples();
  const auto de = EvaluateDetection(f.gateway, f.library, samples, docs,
                                    PromptKind::kDetectAndExplain, {"mock", "cand"});
  ASSERT_EQ(de.size(), 2u);
  EXPECT_EQ(de[0].verdict, Verdict::kInconsistent);
  EXPECT_EQ(de[0].model, "cand");
  EXPECT_EQ(de[1].verdict, Verdict::kUnparsable);
  EXPECT_EQ(f.mock->calls(), 2);  // no re-ask on garbage

  const auto ed = EvaluateDetection(f.gateway, f.library, samples, docs,
                                    PromptKind::kExplainGivenDetection, {"mock", "cand"});
  ASSERT_EQ(ed.size(), 1u);
  EXPECT_EQ(ed[0].sample_id, "s_inc");
  EXPECT_EQ(ed[0].verdict, Verdict::kUnparsable);

  EXPECT_EQ(CodeOf([&] {
              EvaluateDetection(f.gateway, f.library, samples, {},
                                PromptKind::kDetectAndExplain, {"mock", "cand"});
            }),
            ErrorCode::kInvalidArgument);
}

// ---------------------------------------------------------------------------
// judge

TEST(JudgeTest, ContextDisciplinePerVariant) {
  const auto samples = TwoSamples();
  const DocumentRecord doc{"d1", "News", "DOCUMENT_SENTINEL"};
  SeedSummary seed = kSeed;
  seed.text = "SEED_SENTINEL mat";
  for (JudgeVariant v : {JudgeVariant::kV1, JudgeVariant::kV2, JudgeVariant::kV3,
                         JudgeVariant::kV4}) {
    const JudgeContext ctx = MakeJudgeContext(v, samples[0], doc, seed, "CANDIDATE");
    EXPECT_TRUE(JudgeContextViolations(ctx).empty()) << ToString(v);
  }
  const TemplateLibrary lib = TemplateLibrary::Builtin();
  const std::string v4 =
      RenderJudgePrompt(lib, MakeJudgeContext(JudgeVariant::kV4, samples[0], doc, seed, "CAND"));
  EXPECT_EQ(v4.find("DOCUMENT_SENTINEL"), std::string::npos);
  EXPECT_EQ(v4.find("SEED_SENTINEL"), std::string::npos);
  EXPECT_EQ(v4.find(samples[0].summary_text), std::string::npos);
  EXPECT_NE(v4.find("REFERENCE_SENTINEL"), std::string::npos);
  EXPECT_NE(v4.find("CAND"), std::string::npos);

  const std::string v1 =
      RenderJudgePrompt(lib, MakeJudgeContext(JudgeVariant::kV1, samples[0], doc, seed, "CAND"));
  EXPECT_NE(v1.find("DOCUMENT_SENTINEL"), std::string::npos);
  EXPECT_EQ(v1.find("REFERENCE_SENTINEL"), std::string::npos);

  JudgeContext bad = MakeJudgeContext(JudgeVariant::kV4, samples[0], doc, seed, "CAND");
  bad.document = "leak";
  EXPECT_FALSE(JudgeContextViolations(bad).empty());
  EXPECT_EQ(CodeOf([&] { RenderJudgePrompt(lib, bad); }), ErrorCode::kPrecondition);
}

TEST(JudgeTest, ParseLabel) {
  EXPECT_EQ(ParseJudgeLabel(R"({"label":"entirely_correct"})").value(), 1.0);
  EXPECT_EQ(ParseJudgeLabel(R"({"label":"Partially_Correct"})").value(), 0.5);
  EXPECT_EQ(ParseJudgeLabel(R"({"label":" not_correct "})").value(), 0.0);
  EXPECT_EQ(ParseJudgeLabel(R"({"label":"0.5"})").value(), 0.5);
  EXPECT_EQ(ParseJudgeLabel(R"({"label":1})").value(), 1.0);
  EXPECT_EQ(CodeOf([] { ParseJudgeLabel(R"({"label":"mostly right"})"); }),
            ErrorCode::kUnparsable);
  EXPECT_EQ(CodeOf([] { ParseJudgeLabel(R"({"label":0.7})"); }), ErrorCode::kUnparsable);
  EXPECT_EQ(CodeOf([] { ParseJudgeLabel("entirely_correct"); }), ErrorCode::kUnparsable);
}

TEST(JudgeTest, ResponsesJudgedOnlyWhereTheyEnterEs) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text(R"({"label": "partially_correct"})"));
  const auto samples = TwoSamples();
  const std::map<std::string, DocumentRecord> docs{{"d1", {"d1", "News", "doc"}}};
  const std::map<std::string, SeedSummary> seeds{{"m1", kSeed}};
  auto resp = [](std::string sample, PromptKind kind, Verdict v) {
    DetectionResponse r;
    r.sample_id = std::move(sample);
    r.model = "cand";
    r.prompt_kind = kind;
    r.verdict = v;
    if (v != Verdict::kUnparsable) r.explanation = "expl";
    return r;
  };
  const std::vector<DetectionResponse> de{
      resp("s_inc", PromptKind::kDetectAndExplain, Verdict::kInconsistent),
      resp("s_con", PromptKind::kDetectAndExplain, Verdict::kInconsistent)};
  const auto j = JudgeResponses(f.gateway, f.library, samples, docs, seeds, de,
                                JudgeVariant::kV4, {"mock", "judge"});
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0].sample_id, "s_inc");
  EXPECT_EQ(j[0].label, 0.5);
  EXPECT_EQ(j[0].judge_model, "judge");

  const std::vector<DetectionResponse> ed{
      resp("s_inc", PromptKind::kExplainGivenDetection, Verdict::kUnparsable)};
  const auto before = f.mock->calls();
  const auto k = JudgeResponses(f.gateway, f.library, samples, docs, seeds, ed,
                                JudgeVariant::kV4, {"mock", "judge"});
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0].label, 0.0);
  EXPECT_TRUE(k[0].flagged);
  EXPECT_EQ(f.mock->calls(), before);
}

TEST(JudgeTest, UnparsableJudgeDefaultsToZeroAfterReask) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text(R"({"label": "great"})"));
  const auto samples = TwoSamples();
  const JudgeContext ctx = MakeJudgeContext(JudgeVariant::kV4, samples[0],
                                            {"d1", "News", "doc"}, kSeed, "CAND");
  const auto o = JudgeExplanation(f.gateway, f.library, ctx, {"mock", "judge"});
  EXPECT_TRUE(o.flagged);
  EXPECT_EQ(o.label.value.value(), 0.0);
  EXPECT_EQ(f.mock->calls(), 2);
}

// ---------------------------------------------------------------------------
// taxonomy

TEST(TaxonomyTest, ParseCategory) {
  EXPECT_EQ(ParseErrorCategory(R"({"category":"misattribution"})"),
            ErrorCategory::kMisattribution);
  EXPECT_EQ(ParseErrorCategory(R"({"category":"COMPLETENESS_FOCUS"})"),
            ErrorCategory::kCompletenessFocus);
  EXPECT_EQ(CodeOf([] { ParseErrorCategory(R"({"category":"other"})"); }),
            ErrorCode::kUnparsable);
}

TEST(TaxonomyTest, ClassifiesOnlyImperfectJudgments) {
  Fixture f;
  f.mock->SetDefault(ScriptedReply::Text(R"({"category": "VAGUE"})"));
  const auto samples = TwoSamples();
  const std::map<std::string, DocumentRecord> docs{{"d1", {"d1", "News", "doc"}}};
  DetectionResponse r;
  r.sample_id = "s_inc";
  r.model = "cand";
  r.verdict = Verdict::kInconsistent;
  r.explanation = "expl";
  JudgmentRecord good{"s_inc", "cand", PromptKind::kDetectAndExplain, JudgeVariant::kV4, "j", 1.0, false, ""};
  JudgmentRecord half = good;
  half.label = 0.5;
  EXPECT_TRUE(ClassifyExplanationErrors(f.gateway, f.library, samples, docs, {r}, {good},
                                        {"mock", "j"})
                  .empty());
  const auto out = ClassifyExplanationErrors(f.gateway, f.library, samples, docs, {r}, {half},
                                             {"mock", "j"});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].category, ErrorCategory::kVague);
  EXPECT_FALSE(out[0].flagged);
}

// ---------------------------------------------------------------------------
// whole offline pipeline

TEST(PipelineTest, MockRunProducesBalancedBenchmark) {
  const auto r = e2e::RunPipeline(42);
  EXPECT_EQ(r.generated, 600u);
  EXPECT_EQ(r.kept, 420u);
  std::size_t inconsistent = 0;
  for (const auto& s : r.benchmark) inconsistent += s.label == Label::kInconsistent;
  EXPECT_EQ(inconsistent, 420u);
  EXPECT_EQ(r.benchmark.size(), 840u);
  EXPECT_TRUE(ValidateUniqueIds(r.benchmark).ok());
}

}  // namespace
}  // namespace execedit
