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

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "execedit/annotation.hpp"
#include "execedit/annotation_http.hpp"
#include "execedit/error.hpp"
#include "execedit/jsonl.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"
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

AnnotationRecord Answered(const std::string& annotator, const std::string& target,
                          std::vector<Answer> answers) {
  AnnotationRecord r = testutil::EditAnnotation(annotator, target);
  std::optional<Answer>* slots[] = {&r.q_inconsistent, &r.q_complex, &r.q_controlled,
                                     &r.q_explanation};
  for (std::size_t i = 0; i < answers.size(); ++i) *slots[i] = answers[i];
  return r;
}

std::vector<AnnotationItem> MakeItems(int n) {
  std::vector<AnnotationItem> items;
  for (int i = 0; i < n; ++i) {
    AnnotationItem it;
    it.item_id = "item" + std::to_string(i);
    it.document_text = "doc " + std::to_string(i);
    it.seed_summary = "seed";
    it.edited_summary = "edited";
    it.generator_model = "secret-model";
    it.prompt_variant = "executable";
    it.condition = "secret-model (Exec)";
    it.reference_explanation = "ref";
    items.push_back(it);
  }
  return items;
}

// ---------------------------------------------------------------------------
// store

TEST(StoreTest, RevisionsAndLatestWins) {
  AnnotationStore store;
  auto r = Answered("a", "t1", {Answer::kNo});
  EXPECT_EQ(store.Append(r).revision, 0);
  r.q_inconsistent = Answer::kYes;
  const StoredRecord second = store.Append(r);
  EXPECT_EQ(second.revision, 1);
  EXPECT_EQ(second.record_id, AnnotationStore::RecordId(r));
  store.Append(Answered("b", "t1", {Answer::kNo}));
  const auto latest = store.Export();
  ASSERT_EQ(latest.size(), 2u);
  EXPECT_EQ(latest[0].q_inconsistent, Answer::kYes);
  EXPECT_EQ(store.History().size(), 3u);
  EXPECT_TRUE(store.Has("a", "t1", AnnotationKind::kEditQuality));
  EXPECT_FALSE(store.Has("a", "t1", AnnotationKind::kExplanationLabel));
  ExportFilter only_b;
  only_b.annotator_id = "b";
  EXPECT_EQ(store.Export(only_b).size(), 1u);
}

TEST(StoreTest, ReloadsFromFileAndIgnoresTornLine) {
  testutil::TempDir dir;
  const auto path = dir / "log.jsonl";
  {
    AnnotationStore store(path);
    store.Append(Answered("a", "t1", {Answer::kNo}));
    store.Append(Answered("a", "t1", {Answer::kYes, Answer::kNo}));
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"record_id\": \"x\", \"revis";
  }
  AnnotationStore reloaded(path);
  EXPECT_EQ(reloaded.History().size(), 2u);
  const auto latest = reloaded.Export();
  ASSERT_EQ(latest.size(), 1u);
  EXPECT_EQ(latest[0].q_complex, Answer::kNo);
}

TEST(StoreTest, ConcurrentAppendsAreAllKept) {
  testutil::TempDir dir;
  AnnotationStore store(dir / "log.jsonl");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&store, t] {
      for (int i = 0; i < 25; ++i) {
        store.Append(Answered("a" + std::to_string(t), "t" + std::to_string(i), {Answer::kNo}));
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.Export().size(), 100u);
  EXPECT_EQ(AnnotationStore(dir / "log.jsonl").Export().size(), 100u);
}

// ---------------------------------------------------------------------------
// items

TEST(ItemTest, PayloadHidesProvenance) {
  const AnnotationItem item = MakeItems(1)[0];
  const std::string payload = ItemPayload(item).dump();
  EXPECT_EQ(payload.find("secret-model"), std::string::npos);
  EXPECT_EQ(payload.find("prompt_variant"), std::string::npos);
  EXPECT_EQ(Json(item).get<AnnotationItem>().condition, item.condition);
}

TEST(ItemTest, FromEdits) {
  const std::map<std::string, SeedSummary> seeds{{"m1", {"m1", "d1", "A cat sat."}}};
  const std::map<std::string, DocumentRecord> docs{{"d1", {"d1", "News", "doc"}}};
  ExecutableEdit e{"e1", "d1", "m1", "cat", "dog", "why", "gpt", std::nullopt};
  const auto exec = ItemsFromExecutableEdits({e}, seeds, docs);
  ASSERT_EQ(exec.size(), 1u);
  EXPECT_EQ(exec[0].edited_summary, "A dog sat.");
  EXPECT_EQ(exec[0].span, (EditSpan{2, 3, 2, 3}));
  EXPECT_EQ(exec[0].condition, "gpt (Exec)");
  NonExecutableEdit n{"n1", "d1", "m1", "A big dog sat.", "why", "gpt"};
  const auto nonexec = ItemsFromNonExecutableEdits({n}, seeds, docs);
  ASSERT_EQ(nonexec.size(), 1u);
  EXPECT_EQ(nonexec[0].condition, "gpt (Non-Exec)");
  EXPECT_EQ(nonexec[0].span.original_begin, 2u);
}

// ---------------------------------------------------------------------------
// session planning

std::vector<std::string> Ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("i" + std::to_string(i));
  return ids;
}

TEST(PlanTest, OverlapSharedAndRestPartitioned) {
  const auto ids = Ids(100);
  SessionRequest req;
  req.shuffle_seed = 9;
  req.overlap_fraction = 0.2;
  req.annotator_count = 3;
  std::set<std::string> covered;
  std::vector<std::string> overlap;
  std::size_t own_total = 0;
  for (int a = 0; a < 3; ++a) {
    req.annotator_id = "ann" + std::to_string(a);
    req.annotator_index = a;
    const SessionPlan plan = PlanSession(ids, req);
    EXPECT_EQ(plan.overlap_set.size(), 20u);
    if (a == 0) overlap = plan.overlap_set;
    EXPECT_EQ(plan.overlap_set, overlap);
    const std::set<std::string> shared(overlap.begin(), overlap.end());
    for (const auto& id : plan.item_ids) {
      if (!shared.contains(id)) {
        EXPECT_TRUE(covered.insert(id).second) << id << " dealt twice";
        ++own_total;
      }
    }
    EXPECT_EQ(plan.item_ids, PlanSession(ids, req).item_ids);
  }
  EXPECT_EQ(own_total, 80u);
}

TEST(PlanTest, Validation) {
  SessionRequest req;
  EXPECT_EQ(CodeOf([&] { PlanSession({}, req); }), ErrorCode::kEmptySource);
  req.overlap_fraction = 1.5;
  EXPECT_EQ(CodeOf([&] { PlanSession(Ids(3), req); }), ErrorCode::kInvalidArgument);
  req.overlap_fraction = 0;
  req.annotator_index = 2;
  req.annotator_count = 2;
  EXPECT_EQ(CodeOf([&] { PlanSession(Ids(3), req); }), ErrorCode::kInvalidArgument);
}

// ---------------------------------------------------------------------------
// service

TEST(ServiceTest, SessionFlow) {
  AnnotationService service;
  service.AddItemSource("src", MakeItems(3));
  EXPECT_EQ(CodeOf([&] { service.AddItemSource("dup", {MakeItems(1)[0], MakeItems(1)[0]}); }),
            ErrorCode::kInvalidArgument);
  const AnnotationSession s = service.CreateSession({"alice", "src"});
  ASSERT_EQ(s.item_ids.size(), 3u);
  auto next = service.NextItem(s.session_id);
  ASSERT_TRUE(next.has_value());
  EXPECT_EQ((*next)["item_id"], s.item_ids[0]);
  EXPECT_EQ((*next)["position"], 0);

  EXPECT_EQ(CodeOf([&] { service.Submit(s.session_id, Answered("alice", s.item_ids[1], {Answer::kNo})); }),
            ErrorCode::kUnknownItem);
  AnnotationRecord bad = Answered("alice", s.item_ids[0], {Answer::kNo, Answer::kYes});
  EXPECT_EQ(CodeOf([&] { service.Submit(s.session_id, bad); }), ErrorCode::kGatingViolation);
  EXPECT_EQ(CodeOf([&] { service.Submit(s.session_id, Answered("bob", s.item_ids[0], {Answer::kNo})); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { service.Submit("nope", Answered("alice", s.item_ids[0], {Answer::kNo})); }),
            ErrorCode::kUnknownSession);

  const StoredRecord first = service.Submit(s.session_id, Answered("", s.item_ids[0], {Answer::kNo}));
  EXPECT_EQ(first.record.annotator_id, "alice");
  EXPECT_FALSE(first.record.timestamp.empty());
  EXPECT_EQ((*service.NextItem(s.session_id))["item_id"], s.item_ids[1]);
  // Going back to revise an earlier item is allowed.
  EXPECT_EQ(service.Submit(s.session_id, Answered("alice", s.item_ids[0], {Answer::kYes, Answer::kNo}))
                .revision,
            1);
  service.Submit(s.session_id, Answered("alice", s.item_ids[1], {Answer::kNo}));
  service.Submit(s.session_id, Answered("alice", s.item_ids[2], {Answer::kNo}));
  EXPECT_FALSE(service.NextItem(s.session_id).has_value());
  EXPECT_EQ(CodeOf([&] { service.CreateSession({"alice", "missing"}); }), ErrorCode::kEmptySource);
}

TEST(ServiceTest, RestoreReplaysSessionsAndCursor) {
  testutil::TempDir dir;
  std::string id;
  std::vector<std::string> order;
  {
    AnnotationService service(dir.path());
    service.AddItemSource("src", MakeItems(4));
    SessionRequest req{"alice", "src"};
    req.shuffle_seed = 3;
    const auto s = service.CreateSession(req);
    id = s.session_id;
    order = s.item_ids;
    service.Submit(id, Answered("alice", order[0], {Answer::kNo}));
  }
  AnnotationService restored(dir.path());
  restored.AddItemSource("src", MakeItems(4));
  restored.Restore();
  const auto s = restored.GetSession(id);
  EXPECT_EQ(s.item_ids, order);
  EXPECT_EQ(s.cursor, 1u);
  EXPECT_EQ((*restored.NextItem(id))["item_id"], order[1]);
  const auto text = restored.ExportJsonl();
  EXPECT_EQ(ParseJsonl(text, "annotations").records.size(), 1u);
}

// ---------------------------------------------------------------------------
// agreement

TEST(IaaTest, SurvivalFollowsGatingOrder) {
  const std::vector<AnnotationRecord> records{
      Answered("a", "t1", {Answer::kYes, Answer::kYes, Answer::kNo}),
      Answered("b", "t1", {Answer::kYes, Answer::kYes, Answer::kNo}),
      Answered("a", "t2", {Answer::kYes, Answer::kNo}),
      Answered("b", "t2", {Answer::kYes, Answer::kYes, Answer::kYes}),
      Answered("a", "t3", {Answer::kNo}),
      Answered("b", "t3", {Answer::kYes, Answer::kNo}),
      Answered("a", "t4", {Answer::kNo}),  // b never saw t4
  };
  EXPECT_EQ(ComputeIaa(records, "a", "b", Question::kInconsistent).report.n, 3u);
  EXPECT_EQ(ComputeIaa(records, "a", "b", Question::kComplex).report.n, 2u);
  EXPECT_EQ(ComputeIaa(records, "a", "b", Question::kControlled).report.n, 1u);
  EXPECT_EQ(CodeOf([&] { ComputeIaa(records, "a", "b", Question::kExplanation); }),
            ErrorCode::kEmptyOverlap);
  const auto table = IaaTable(records, "a", "b");
  EXPECT_EQ(table.size(), 3u);
  EXPECT_NE(FormatIaaTable(table).find("complex"), std::string::npos);
}

TEST(IaaTest, KappaMatchesOracleOnRandomExports) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    std::vector<AnnotationRecord> records;
    for (int i = 0; i < 60; ++i) {
      records.push_back(testutil::GatedRecord("a", "t" + std::to_string(i), rng, 0.75));
      records.push_back(testutil::GatedRecord("b", "t" + std::to_string(i), rng, 0.75));
    }
    std::vector<double> va, vb;
    for (int i = 0; i < 60; ++i) {
      va.push_back(*records[2 * i].q_inconsistent == Answer::kYes);
      vb.push_back(*records[2 * i + 1].q_inconsistent == Answer::kYes);
    }
    EXPECT_NEAR(ComputeIaa(records, "a", "b", Question::kInconsistent).report.cohen_kappa,
                oracle::CohenKappa(va, vb), 1e-9);
  }
}

TEST(IaaTest, LabelAgreement) {
  std::vector<AnnotationRecord> records;
  const double a[] = {1, 0.5, 0, 1};
  const double b[] = {1, 0.5, 0.5, 1};
  for (int i = 0; i < 4; ++i) {
    for (auto [who, v] : {std::pair{"a", a[i]}, std::pair{"b", b[i]}}) {
      AnnotationRecord r;
      r.annotator_id = who;
      r.target_id = "x" + std::to_string(i);
      r.kind = AnnotationKind::kExplanationLabel;
      r.label = v;
      records.push_back(r);
    }
  }
  const auto r = ComputeLabelIaa(records, "a", "b");
  EXPECT_EQ(r.report.n, 4u);
  EXPECT_NEAR(r.report.cohen_kappa,
              oracle::CohenKappa({1, 0.5, 0, 1}, {1, 0.5, 0.5, 1}), 1e-12);
}

// ---------------------------------------------------------------------------
// HTTP

class HttpFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    service_.AddItemSource("src", MakeItems(2));
    server_ = std::make_unique<AnnotationHttpServer>(service_);
    port_ = server_->Bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->Serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100; ++i) {
      if (client_->Get("/export")) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  void TearDown() override {
    server_->Stop();
    thread_.join();
  }

  AnnotationService service_;
  std::unique_ptr<AnnotationHttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpFixture, RoundTrip) {
  auto res = client_->Post("/sessions", R"({"annotator_id":"alice","item_source":"src"})",
                           "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  const Json session = Json::parse(res->body);
  const std::string sid = session["session_id"];
  EXPECT_FALSE(session.contains("item_source"));

  res = client_->Get("/sessions/" + sid + "/next");
  ASSERT_TRUE(res);
  const Json next = Json::parse(res->body);
  EXPECT_FALSE(next["done"].get<bool>());
  EXPECT_EQ(res->body.find("secret-model"), std::string::npos);
  const std::string target = next["item"]["item_id"];

  res = client_->Post("/sessions/" + sid + "/annotations",
                      Json{{"target_id", target}, {"q_inconsistent", "no"}}.dump(),
                      "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_EQ(Json::parse(res->body)["revision"], 0);

  res = client_->Get("/export?filter=annotator:alice,mode:edit_quality");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/x-ndjson");
  EXPECT_EQ(ParseJsonl(res->body, "annotations").records.size(), 1u);
}

TEST_F(HttpFixture, ErrorMapping) {
  auto res = client_->Get("/sessions/missing/next");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(Json::parse(res->body)["error"], "UnknownSession");

  res = client_->Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client_->Post("/sessions", R"({"annotator_id":"a","item_source":"none"})",
                      "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);

  res = client_->Post("/sessions", R"({"annotator_id":"a","item_source":"src"})",
                      "application/json");
  const std::string sid = Json::parse(res->body)["session_id"];
  const std::string first = service_.GetSession(sid).item_ids[0];
  res = client_->Post("/sessions/" + sid + "/annotations",
                      Json{{"target_id", first}, {"q_inconsistent", "no"}, {"q_complex", "yes"}}
                          .dump(),
                      "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(Json::parse(res->body)["error"], "GatingViolation");

  res = client_->Get("/export?filter=colour:red");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client_->Options("/sessions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
}

TEST(ExportFilterTest, Parse) {
  const ExportFilter f = ParseExportFilter("annotator:a, kind:explanation_label,target:t9");
  EXPECT_EQ(f.annotator_id, "a");
  EXPECT_EQ(f.kind, AnnotationKind::kExplanationLabel);
  EXPECT_EQ(f.target_id, "t9");
  EXPECT_FALSE(ParseExportFilter("").annotator_id.has_value());
  EXPECT_EQ(CodeOf([] { ParseExportFilter("annotator"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace execedit
