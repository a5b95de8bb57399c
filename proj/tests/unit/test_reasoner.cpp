#include "bnb/error.hpp"
#include "bnb/reasoner.hpp"
#include "bnb/text.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace bnb;
using bnb::testing::fixture;

namespace {

ElementSpec link_el(const std::string& ref, const std::string& label) {
    return ElementSpec{ref, ElementKind::Link, label, std::nullopt, {}};
}

ProposeRequest request(const std::string& objective, std::vector<ElementSpec> elements, std::size_t b = 5) {
    ProposeRequest req;
    req.intent = "task";
    req.node.url = "http://x.test/";
    req.node.title = "X";
    req.node.elements = std::move(elements);
    req.node.objective = objective;
    req.subtask = Subtask{0, objective, pred::EvaluatorFlag{}, SubtaskStatus::Active, 0};
    req.max_proposals = b;
    return req;
}

PageView page_view(const std::string& page_id) {
    const auto g = load_site_graph(fixture("sites/miniadmin.json"));
    const auto& p = g.page(page_id);
    PageView v;
    v.url = p.url;
    v.title = p.title;
    v.dom_text = p.dom_text;
    v.elements = p.elements;
    return v;
}

EvaluateRequest eval_request(const PageView& v, const std::string& objective,
                             PredicateSpec pred = pred::EvaluatorFlag{}) {
    return EvaluateRequest{"task", v, Subtask{0, objective, std::move(pred), SubtaskStatus::Active, 0}, false};
}

} // namespace

TEST_CASE("tokenizer") {
    CHECK(tokenize("Top-1 best-selling BRAND, Q1 2022!") ==
          std::vector<std::string>{"top", "1", "best", "selling", "brand", "q1", "2022"});
    CHECK(tokenize("  ").empty());
    CHECK(overlap(token_set("admin panel"), token_set("Admin Panel link")) == 2);
    CHECK(contains_ci("Sales REPORT", "report"));
}

TEST_CASE("scripted propose ranks by overlap") {
    const auto req = request("admin panel", {link_el("e_careers", "Careers"), link_el("e_admin", "Admin panel")});
    const auto props = scripted_propose(req);
    REQUIRE(props.size() == 2);
    CHECK(props[0].action == Action{act::Click{"e_admin"}});
    CHECK(props[0].relevance == 1.0);
    CHECK(props[1].relevance == 0.0);
}

TEST_CASE("scripted propose on a zero-overlap page") {
    const auto req = request("quarterly filter", {link_el("e_c", "Careers"), link_el("e_a", "About"), link_el("e_b", "Blog")});
    const auto props = scripted_propose(req);
    REQUIRE(props.size() == 3);
    CHECK(props[0].action == Action{act::Click{"e_a"}});
    CHECK(props[1].action == Action{act::Click{"e_b"}});
    CHECK(props[2].action == Action{act::Click{"e_c"}});
    for (const auto& p : props) CHECK(p.relevance == 0.0);
    CHECK(scripted_propose(request("quarterly filter", req.node.elements, 1)).size() == 1);
}

TEST_CASE("scripted propose element kinds") {
    auto req = request("filter Q1 2022",
                       {ElementSpec{"e_q", ElementKind::Field, "Period", std::nullopt, {}},
                        ElementSpec{"e_plan", ElementKind::Select, "Quarter", std::nullopt, {"Q4 2021", "Q1 2022"}},
                        ElementSpec{"e_drag", ElementKind::Draggable, "Q1 2022", std::nullopt, {}},
                        ElementSpec{"e_go", ElementKind::Button, "Filter", std::nullopt, {}}});
    req.inputs = {"Q4 2021", "Q1 2022"};
    const auto props = scripted_propose(req);
    REQUIRE(props.size() == 3);
    CHECK(props[0].action == Action{act::Select{"e_plan", "Q1 2022"}});
    CHECK(props[1].action == Action{act::Type{"e_q", "Q1 2022"}});
    CHECK(props[2].action == Action{act::Click{"e_go"}});

    req.inputs.clear();
    for (const auto& p : scripted_propose(req)) CHECK(p.action.kind() != ActionKind::Type);
}

TEST_CASE("scripted propose suppresses irrelevant signatures") {
    auto req = request("admin panel", {link_el("e_admin", "Admin panel"), link_el("e_b", "Blog")});
    req.node.action_memory.push_back(ActionEntry{"CLICK|e_admin", Relevance::Irrelevant, true, ""});
    const auto props = scripted_propose(req);
    REQUIRE(props.size() == 1);
    CHECK(props[0].action == Action{act::Click{"e_b"}});
}

TEST_CASE("scripted propose answers when the final subtask holds") {
    const auto v = page_view("results");
    auto req = request("aggregate and select top brand", v.elements);
    req.intent = "What is the top-1 best-selling brand in Q1 2022?";
    req.node.title = v.title;
    req.node.dom_text = v.dom_text;
    req.final_subtask = true;
    const auto props = scripted_propose(req);
    REQUIRE_FALSE(props.empty());
    const auto* stop = props[0].action.get_if<act::Stop>();
    REQUIRE(stop);
    CHECK(stop->answer.find("Brand-X") != std::string::npos);

    req.final_subtask = false;
    CHECK(scripted_propose(req)[0].action.kind() != ActionKind::Stop);
}

TEST_CASE("scripted evaluate") {
    const auto reports = page_view("reports");
    CHECK(scripted_evaluate(eval_request(reports, "sales report")).score == 1.0);
    CHECK(scripted_evaluate(eval_request(reports, "sales report")).subtask_done);
    CHECK(scripted_evaluate(eval_request(reports, "invite staff")).score == 0.0);

    // half overlap: count words of a two-word objective found on the page
    const std::string objective = "admin report";
    const auto page = token_set(reports.title + " " + reports.dom_text);
    std::size_t found = 0;
    for (const auto& w : {"admin", "report"}) found += page.count(w);
    REQUIRE(found == 1);
    const auto half = scripted_evaluate(eval_request(reports, objective));
    CHECK(half.score == doctest::Approx(found / 2.0));
    CHECK_FALSE(half.subtask_done);

    const auto by_url = scripted_evaluate(eval_request(reports, "invite staff", pred::UrlReached{reports.url}));
    CHECK(by_url.subtask_done);
    CHECK(by_url.score == 0.0);
}

TEST_CASE("proposal validation") {
    std::vector<ActionProposal> props(7, ActionProposal{act::Click{"e"}, "", 1.7});
    props[1].relevance = std::nan("");
    props[2].relevance = -3;
    const auto out = validate_proposals(props, 5);
    CHECK(out.size() == 5);
    CHECK(out[0].relevance == 1.0);
    CHECK(out[1].relevance == 0.0);
    CHECK(out[2].relevance == 0.0);
    CHECK(clamped(Evaluation{1.7, false, false, ""}).score == 1.0);
}

TEST_CASE("response parsing") {
    const Json ok = Json::parse(R"({"version":1,"kind":"evaluate","result":{"score":1.7,"subtask_done":true}})");
    const auto e = parse_evaluate_response(ok);
    CHECK(e.score == 1.0);
    CHECK(e.subtask_done);

    Json missing = ok;
    missing["result"].erase("score");
    CHECK_THROWS_AS(parse_evaluate_response(missing), MalformedResponse);
    Json wrong_kind = ok;
    wrong_kind["kind"] = "propose";
    CHECK_THROWS_AS(parse_evaluate_response(wrong_kind), MalformedResponse);
    Json old = ok;
    old["version"] = 0;
    CHECK_THROWS_AS(parse_evaluate_response(old), MalformedResponse);

    const Json bad_action = Json::parse(
        R"({"version":1,"kind":"propose","result":{"proposals":[{"action":{"type":"SCROLL","args":{}},"relevance":0.5}]}})");
    CHECK_THROWS_AS(parse_propose_response(bad_action, RequestKind::Propose, 5), MalformedResponse);
    const Json empty_sub = Json::parse(R"({"version":1,"kind":"decompose","result":{"subtasks":[{"objective":""}]}})");
    CHECK_THROWS_AS(parse_decompose_response(empty_sub), MalformedResponse);
    CHECK_FALSE(parse_refine_response(Json::parse(R"({"version":1,"kind":"refine","result":{}})")));
}

TEST_CASE("request payloads are bounded") {
    auto req = request("x", {});
    req.node.dom_text = std::string(10000, 'a');
    const Json payload = render_propose_payload(req, 100);
    CHECK(payload["snapshot"]["dom_text"].get<std::string>().size() == 100);
    const Json doc = render_request(RequestKind::Propose, payload, 42);
    CHECK(doc["kind"] == "propose");
    CHECK(doc["version"] == 1);
    CHECK(doc["seed"] == 42);
    for (const auto* key : {"objective", "progress_summary", "history", "snapshot", "action_memory"}) {
        CHECK(payload.contains(key));
    }
}

namespace {

// Local endpoint answering every request with a fixed document per kind.
class EchoServer {
public:
    EchoServer() {
        server_.Post("/reason", [this](const httplib::Request& req, httplib::Response& res) {
            ++calls;
            const Json in = Json::parse(req.body);
            last_request = in;
            if (fail_first > 0) {
                --fail_first;
                res.status = 503;
                return;
            }
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
            const auto kind = in.at("kind").get<std::string>();
            res.set_content(responses.count(kind) ? responses.at(kind) : "{}", "application/json");
        });
        server_.Post("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~EchoServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint(const std::string& path = "/reason") const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    std::map<std::string, std::string> responses;
    std::atomic<int> calls{0};
    std::atomic<int> fail_first{0};
    std::chrono::milliseconds delay{0};
    Json last_request;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

Json proposals_doc(std::size_t n) {
    Json list = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        list.push_back(Json{{"action", render_action(act::Click{"e" + std::to_string(i)})},
                            {"rationale", "r" + std::to_string(i)},
                            {"relevance", 1.0 - 0.1 * static_cast<double>(i)}});
    }
    return Json{{"version", 1}, {"kind", "propose"}, {"result", {{"proposals", list}}}};
}

} // namespace

TEST_CASE("remote reasoner against a local endpoint") {
    EchoServer server;
    RemoteConfig cfg;
    cfg.endpoint = server.endpoint();
    cfg.timeout = std::chrono::milliseconds(2000);
    cfg.retries = 1;
    RemoteReasoner remote(cfg);

    SUBCASE("fixed proposals pass through") {
        server.responses["propose"] = proposals_doc(3).dump();
        const auto props = remote.propose(request("admin", {}, 5));
        REQUIRE(props.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(props[i].action == Action{act::Click{"e" + std::to_string(i)}});
            CHECK(props[i].rationale == "r" + std::to_string(i));
            CHECK(props[i].relevance == doctest::Approx(1.0 - 0.1 * static_cast<double>(i)));
        }
        CHECK(server.last_request["kind"] == "propose");
        CHECK(server.last_request["payload"]["max_proposals"] == 5);
    }
    SUBCASE("seven proposals truncated to b") {
        server.responses["propose"] = proposals_doc(7).dump();
        CHECK(remote.propose(request("admin", {}, 5)).size() == 5);
    }
    SUBCASE("background requests are tagged") {
        Json doc = proposals_doc(2);
        doc["kind"] = "background_infer";
        server.responses["background_infer"] = doc.dump();
        CHECK(remote.background_infer(request("admin", {}, 5)).size() == 2);
        CHECK(server.last_request["kind"] == "background_infer");
    }
    SUBCASE("evaluation is clamped") {
        server.responses["evaluate"] = R"({"version":1,"kind":"evaluate","result":{"score":1.7,"subtask_done":false}})";
        CHECK(remote.evaluate(eval_request(page_view("home"), "x")).score == 1.0);
    }
    SUBCASE("missing score") {
        server.responses["evaluate"] = R"({"version":1,"kind":"evaluate","result":{"subtask_done":false}})";
        CHECK_THROWS_AS(remote.evaluate(eval_request(page_view("home"), "x")), MalformedResponse);
        CHECK(server.calls == 1);
    }
    SUBCASE("non-JSON body") {
        server.responses["refine"] = "<html>";
        CHECK_THROWS_AS(remote.refine(RefineRequest{}), MalformedResponse);
    }
    SUBCASE("decompose and refine") {
        server.responses["decompose"] =
            R"({"version":1,"kind":"decompose","result":{"subtasks":[{"objective":"a"},{"objective":"b","predicate":{"type":"url_reached","url":"http://x.test/"}}]}})";
        server.responses["refine"] = R"({"version":1,"kind":"refine","result":{"objective":"new"}})";
        const auto hints = remote.decompose(DecomposeRequest{"task", {}, {}});
        REQUIRE(hints.size() == 2);
        CHECK(hints[1].predicate == PredicateSpec{pred::UrlReached{"http://x.test/"}});
        CHECK(remote.refine(RefineRequest{}) == std::optional<std::string>("new"));
    }
    SUBCASE("server errors are retried") {
        server.responses["evaluate"] = R"({"version":1,"kind":"evaluate","result":{"score":0.5,"subtask_done":false}})";
        server.fail_first = 1;
        CHECK(remote.evaluate(eval_request(page_view("home"), "x")).score == 0.5);
        CHECK(server.calls == 2);
    }
    SUBCASE("retries are bounded") {
        server.fail_first = 10;
        CHECK_THROWS_AS(remote.evaluate(eval_request(page_view("home"), "x")), TransportError);
        CHECK(server.calls == 2);
    }
    SUBCASE("client errors are not retried") {
        RemoteConfig c = cfg;
        c.endpoint = server.endpoint("/missing");
        RemoteReasoner r(c);
        CHECK_THROWS_AS(r.evaluate(eval_request(page_view("home"), "x")), TransportError);
    }
    SUBCASE("timeout") {
        server.responses["evaluate"] = R"({"version":1,"kind":"evaluate","result":{"score":0.5,"subtask_done":false}})";
        server.delay = std::chrono::milliseconds(600);
        RemoteConfig c = cfg;
        c.timeout = std::chrono::milliseconds(100);
        c.retries = 0;
        RemoteReasoner r(c);
        CHECK_THROWS_AS(r.evaluate(eval_request(page_view("home"), "x")), ReasonerTimeout);
    }
}

TEST_CASE("remote reasoner without a server") {
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    RemoteConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/reason";
    cfg.timeout = std::chrono::milliseconds(500);
    cfg.retries = 1;
    RemoteReasoner remote(cfg);
    CHECK_THROWS_AS(remote.evaluate(eval_request(page_view("home"), "x")), ReasonerFailure);
    CHECK_THROWS_AS(RemoteReasoner(RemoteConfig{"localhost:80"}), InvalidConfig);
}
