#pragma once

// Every translation unit includes cpp-httplib through this header so that
// they agree on TLS support.
#if defined(DECOR_WITH_OPENSSL) && __has_include(<openssl/ssl.h>)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
