#include "wec/validation/service.h"

#include <mutex>

#include <httplib.h>

#include "wec/util/log.h"

namespace wec::validation {

namespace {

void send_json(httplib::Response &res, int status, const nlohmann::json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, const std::string &kind, const std::string &message) {
    send_json(res, status, {{"error", kind}, {"message", message}});
}

std::optional<std::string> param(const httplib::Request &req, const char *name) {
    if (!req.has_param(name))
        return std::nullopt;
    return req.get_param_value(name);
}

std::string required(const httplib::Request &req, const char *name) {
    auto v = param(req, name);
    if (!v || v->empty())
        throw InputError(std::string("missing query parameter '") + name + "'");
    return *v;
}

} // namespace

struct Service::Impl {
    Store &store;
    ServiceOptions options;
    httplib::Server server;
    // Exports rewrite files under export_dir; one at a time.
    std::mutex export_mutex;

    Impl(Store &s, ServiceOptions o) : store(s), options(std::move(o)) {}

    template <typename Fn>
    httplib::Server::Handler guarded(const char *route, Fn fn) {
        return [this, route, fn](const httplib::Request &req, httplib::Response &res) {
            try {
                fn(req, res);
            } catch (const UnknownTaskError &e) {
                send_error(res, 404, "unknown_task", e.what());
            } catch (const UnjudgedTasksError &e) {
                send_json(res, 409, {{"error", "unjudged_tasks"}, {"message", e.what()}, {"tasks", e.tasks}});
            } catch (const InputError &e) {
                send_error(res, 400, "bad_request", e.what());
            } catch (const nlohmann::json::exception &e) {
                send_error(res, 400, "bad_json", e.what());
            } catch (const std::exception &e) {
                log::error("request_failed", {{"route", route}, {"message", e.what()}});
                send_error(res, 500, "internal", e.what());
            }
        };
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
        server.Options(".*", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

        server.Get("/tasks/next", guarded("/tasks/next", [this](const auto &req, auto &res) {
                       auto task = store.next_task(required(req, "annotator"), param(req, "split"));
                       if (!task) {
                           res.status = 204;
                           return;
                       }
                       send_json(res, 200, to_json(*task));
                   }));
        server.Get(R"(/tasks/(-?\d+))", guarded("/tasks/ID", [this](const auto &req, auto &res) {
                       send_json(res, 200, to_json(store.task(std::stoll(req.matches[1].str()))));
                   }));
        server.Post("/judgments", guarded("/judgments", [this](const auto &req, auto &res) {
                        auto ack = store.submit(judgment_from_json(nlohmann::json::parse(req.body)));
                        send_json(res, 200, to_json(ack));
                    }));
        server.Get("/progress", guarded("/progress", [this](const auto &, auto &res) {
                       send_json(res, 200, store.progress());
                   }));
        server.Get("/agreement", guarded("/agreement", [this](const auto &req, auto &res) {
                       const auto annotator = required(req, "annotator");
                       auto body = to_json(store.agreement_for(annotator));
                       body["annotator"] = annotator;
                       body["consolidator"] = store.consolidator();
                       send_json(res, 200, body);
                   }));
        server.Post("/export", guarded("/export", [this](const auto &req, auto &res) {
                        const auto split = required(req, "split");
                        const auto partial = param(req, "partial");
                        const bool is_partial = partial && (*partial == "1" || *partial == "true");
                        auto result = store.export_validated(split, is_partial);
                        std::lock_guard lock(export_mutex);
                        auto summary = write_export(options.export_dir, result, options.train);
                        summary["export_dir"] = options.export_dir.string();
                        log::info("split_exported", summary);
                        send_json(res, 200, summary);
                    }));
        server.set_logger([](const httplib::Request &req, const httplib::Response &res) {
            log::debug("http_request", {{"method", req.method}, {"path", req.path}, {"status", res.status}});
        });
    }
};

Service::Service(Store &store, ServiceOptions options) : impl_(std::make_unique<Impl>(store, std::move(options))) {
    if (impl_->options.export_dir.empty())
        impl_->options.export_dir = store.dir() / "exports";
    impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string &host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_ && impl_->server.is_running())
        impl_->server.stop();
}

} // namespace wec::validation
