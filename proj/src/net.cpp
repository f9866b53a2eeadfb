#include "tello_arena/net.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace tello::net {

namespace {

std::string last_error() { return std::strerror(errno); }

bool wait_fd(int fd, short events, int timeout_ms)
{
    pollfd p{fd, events, 0};
    for (;;) {
        const int r = ::poll(&p, 1, timeout_ms);
        if (r < 0 && errno == EINTR)
            continue;
        return r > 0;
    }
}

std::uint16_t port_of(int fd)
{
    sockaddr_in a{};
    socklen_t len = sizeof a;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&a), &len) != 0)
        throw NetError(NetErrc::IoError, "getsockname: " + last_error());
    return ntohs(a.sin_port);
}

Fd bound_socket(int type, const std::string& host, std::uint16_t port)
{
    Fd fd(::socket(AF_INET, type | SOCK_CLOEXEC, 0));
    if (!fd)
        throw NetError(NetErrc::IoError, "socket: " + last_error());
    if (type == SOCK_STREAM) {
        const int one = 1;
        ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    }
    const Endpoint ep = make_endpoint(host, port);
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&ep.addr), sizeof ep.addr) != 0)
        throw NetError(NetErrc::PortBindFailure, "cannot bind " + ep.to_string() + ": " + last_error());
    return fd;
}

}  // namespace

Fd& Fd::operator=(Fd&& o) noexcept
{
    if (this != &o) {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

Fd::~Fd()
{
    if (fd_ >= 0)
        ::close(fd_);
}

std::string Endpoint::to_string() const
{
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof buf);
    return std::string(buf) + ":" + std::to_string(ntohs(addr.sin_port));
}

bool Endpoint::operator==(const Endpoint& o) const
{
    return addr.sin_addr.s_addr == o.addr.sin_addr.s_addr && addr.sin_port == o.addr.sin_port;
}

Endpoint make_endpoint(const std::string& host, std::uint16_t port)
{
    Endpoint ep;
    ep.addr.sin_family = AF_INET;
    ep.addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        ep.addr.sin_addr.s_addr = htonl(INADDR_ANY);
        return ep;
    }
    if (::inet_pton(AF_INET, host.c_str(), &ep.addr.sin_addr) == 1)
        return ep;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
        throw NetError(NetErrc::BadAddress, "cannot resolve " + host);
    ep.addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return ep;
}

UdpSocket UdpSocket::bind(const std::string& host, std::uint16_t port)
{
    UdpSocket s;
    s.fd_ = bound_socket(SOCK_DGRAM, host, port);
    return s;
}

UdpSocket UdpSocket::client() { return bind("0.0.0.0", 0); }

void UdpSocket::send_to(const std::string& data, const Endpoint& to) const
{
    if (::sendto(fd_.get(), data.data(), data.size(), 0, reinterpret_cast<const sockaddr*>(&to.addr), sizeof to.addr) < 0)
        throw NetError(NetErrc::IoError, "sendto " + to.to_string() + ": " + last_error());
}

std::optional<std::pair<std::string, Endpoint>> UdpSocket::receive(int timeout_ms) const
{
    if (!wait_fd(fd_.get(), POLLIN, timeout_ms))
        return std::nullopt;
    char buf[2048];
    Endpoint from;
    socklen_t len = sizeof from.addr;
    const ssize_t n = ::recvfrom(fd_.get(), buf, sizeof buf, 0, reinterpret_cast<sockaddr*>(&from.addr), &len);
    if (n < 0)
        return std::nullopt;
    return std::make_pair(std::string(buf, static_cast<std::size_t>(n)), from);
}

std::uint16_t UdpSocket::local_port() const { return port_of(fd_.get()); }

TcpStream TcpStream::connect(const std::string& host, std::uint16_t port, int timeout_ms)
{
    Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd)
        throw NetError(NetErrc::IoError, "socket: " + last_error());
    const Endpoint ep = make_endpoint(host, port);
    const int flags = ::fcntl(fd.get(), F_GETFL);
    ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
    const int r = ::connect(fd.get(), reinterpret_cast<const sockaddr*>(&ep.addr), sizeof ep.addr);
    if (r != 0 && errno != EINPROGRESS)
        throw NetError(NetErrc::ConnectFailure, "connect " + ep.to_string() + ": " + last_error());
    if (r != 0) {
        if (!wait_fd(fd.get(), POLLOUT, timeout_ms))
            throw NetError(NetErrc::ConnectFailure, "connect " + ep.to_string() + ": timeout");
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0)
            throw NetError(NetErrc::ConnectFailure, "connect " + ep.to_string() + ": " + std::strerror(err));
    }
    ::fcntl(fd.get(), F_SETFL, flags);
    return TcpStream(std::move(fd));
}

bool TcpStream::send_all(std::span<const std::uint8_t> data) const
{
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_.get(), data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

bool TcpStream::read_exact(std::span<std::uint8_t> out, int timeout_ms) const
{
    std::size_t got = 0;
    while (got < out.size()) {
        if (!wait_fd(fd_.get(), POLLIN, timeout_ms))
            return false;
        const ssize_t n = ::recv(fd_.get(), out.data() + got, out.size() - got, 0);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

void TcpStream::shutdown() const
{
    if (fd_)
        ::shutdown(fd_.get(), SHUT_RDWR);
}

TcpListener TcpListener::bind(const std::string& host, std::uint16_t port)
{
    TcpListener l;
    l.fd_ = bound_socket(SOCK_STREAM, host, port);
    if (::listen(l.fd_.get(), 8) != 0)
        throw NetError(NetErrc::PortBindFailure, "listen: " + last_error());
    return l;
}

std::optional<TcpStream> TcpListener::accept(int timeout_ms) const
{
    if (!wait_fd(fd_.get(), POLLIN, timeout_ms))
        return std::nullopt;
    Fd fd(::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC));
    if (!fd)
        return std::nullopt;
    return TcpStream(std::move(fd));
}

std::uint16_t TcpListener::local_port() const { return port_of(fd_.get()); }

}  // namespace tello::net
