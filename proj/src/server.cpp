#include "orecast/error.hpp"
#include "orecast/service.hpp"

#include <httplib.h>

namespace orecast::service {

struct HttpServer::Impl {
	explicit Impl(const Service &s) : service(s) {}

	const Service &service;
	httplib::Server server;
};

HttpServer::HttpServer(const Service &service) : impl_(std::make_unique<Impl>(service)) {
	// SO_REUSEPORT (the httplib default) would let a second server share a busy port.
	impl_->server.set_socket_options([](socket_t sock) {
		int yes = 1;
		setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void *>(&yes), sizeof(yes));
	});
	impl_->server.Get(R"(/api/.*)", [this](const httplib::Request &req, httplib::Response &res) {
		const Query query(req.params.begin(), req.params.end());
		const auto r = impl_->service.get(req.path, query);
		res.status = r.status;
		res.set_content(r.body, "application/json; charset=utf-8");
	});
	if (const auto &dir = service.config().static_dir) {
		if (!impl_->server.set_mount_point("/", dir->string())) {
			throw ParamError("static directory does not exist: " + dir->string(), "static");
		}
	}
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string &host, int port) {
	int bound = -1;
	if (port == 0) {
		bound = impl_->server.bind_to_any_port(host);
	} else if (impl_->server.bind_to_port(host, port)) {
		bound = port;
	}
	if (bound < 0) {
		throw BindError("cannot bind " + host + ":" + std::to_string(port), "port");
	}
	return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve(const Service &service) {
	HttpServer server(service);
	server.bind(service.config().host, service.config().port);
	server.listen();
}

} // namespace orecast::service
