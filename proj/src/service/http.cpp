#include <iostream>

#include "ccs/error.hpp"
#include "ccs/service/service.hpp"
#include "httplib.h"

namespace ccs::service {

void serve_http(Service& service, const std::string& host, int port) {
    httplib::Server server;
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        const Response out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    const std::string any = R"(/.*)";
    server.Get(any, handler);
    server.Post(any, handler);
    server.Put(any, handler);
    server.Delete(any, handler);
    server.set_payload_max_length(std::size_t{512} << 20);
    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) throw Error(errc::kIo, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace ccs::service
