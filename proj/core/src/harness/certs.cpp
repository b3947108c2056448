#include "certs.hpp"

namespace twinaudit::harness::certs {

const char* const kWebServerCertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIIB0DCCAXegAwIBAgIUSpqo2yQwpvNR5431ekGQlOgyvW8wCgYIKoZIzj0EAwIw
PjELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRkwFwYDVQQDDBB3
d3cuZXhhbXBsZS50ZXN0MB4XDTI2MTAxNDExMTAxNloXDTI4MTAxMzExMTAxNlow
PjELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRkwFwYDVQQDDBB3
d3cuZXhhbXBsZS50ZXN0MFkwEwYHKoZIzj0CAQYIKoZIzj0DAQcDQgAEcYB6NDNX
mh4O6IVnWdkcqyp7s4x4miICk12Sp5S9MGilOGDR7TQrFlo8J/s5ghbzOqAnvaAm
I76ev3KH6nKqOKNTMFEwHQYDVR0OBBYEFCYCFEglSPpHtnxovTjHg5jcnDa5MB8G
A1UdIwQYMBaAFCYCFEglSPpHtnxovTjHg5jcnDa5MA8GA1UdEwEB/wQFMAMBAf8w
CgYIKoZIzj0EAwIDRwAwRAIgW8+9CibEYS8BSs9vCRZ5Z1gUe9WW1s0eVyXTheuV
RewCIDELa+qegXDDtyff83lKBkvs6MmS4svHccTEfvNF6yO+
-----END CERTIFICATE-----
)PEM";

const char* const kMailServerCertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIIDXzCCAkegAwIBAgIUdf6CzWdJIAe6obGzSRrccsF0NegwDQYJKoZIhvcNAQEL
BQAwPzELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRowGAYDVQQD
DBFtYWlsLmV4YW1wbGUudGVzdDAeFw0yNjEwMTQxMTEwMTZaFw0yODEwMTMxMTEw
MTZaMD8xCzAJBgNVBAYTAkRFMRQwEgYDVQQKDAtFeGFtcGxlIFNNQjEaMBgGA1UE
AwwRbWFpbC5leGFtcGxlLnRlc3QwggEiMA0GCSqGSIb3DQEBAQUAA4IBDwAwggEK
AoIBAQCtsA2+7uYptJU7FzJ24lRuA0Jto8bQRatHBCYVSMsf2iAevmr0UlkY4Rab
Akg4ZyswvX/X4w0m4yKJMkj2P53PICPSySsjHkFYZa8ltX6v6P8AOFpeuac7dtmD
blDj946zRej7FnvNa2NzUf1uziX3Ot5NtK4o1+e5yKEiBADGGhhRvoCo/p2/vWBp
8nGaskEQN23hufnxeL9W2fxIUP4Vq7E940jbWDcE+NzT7ytiGI9fZx6ogDPcVNC7
3JxLKl1oQ+TDK4R/f6BxnDArDb8JwTUKjfmST6UoMyI0XuOBO66longe+DxXBX+j
1AirulgZXisCnoDUIJuj4RomV3shAgMBAAGjUzBRMB0GA1UdDgQWBBQRsUhVfvPX
G6LzR5HDFZyLBppwNjAfBgNVHSMEGDAWgBQRsUhVfvPXG6LzR5HDFZyLBppwNjAP
BgNVHRMBAf8EBTADAQH/MA0GCSqGSIb3DQEBCwUAA4IBAQCmSC0yMsFgvY4pCanz
e59WwukHmxa6GOenoZCBF7s200+wuMEkGcBepGiJgYBJJoW1hWl5B2+IH1Ec/37a
DI1CeGN8KJIJc4rgnTwcpANpGZpXm70Gnu+6j6joOcTxBE7mTFDnGjE4kNxnDiFg
V+ojXxIQCUlt6hTwM2ansWdjiKeyM43s19hU77UawAmofvFnyb7q8YtstYXfl6+J
0pIXZLvC4TFm8N/v0ogd4sqAJGZ3seaLFYTtfRQGa/wx2n/hgCNvC7JoW31DhbXE
tLJip++a8mQZasJyggPT537iQ4gJxNoIaLpac0+sbMSsc/+i+Nq4/wmVxpIxrIcw
tqbj
-----END CERTIFICATE-----
)PEM";

const char* const kMailServerReplacementCertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIIDXzCCAkegAwIBAgIUTLhmBOAmxTheYY/rHUuboqrtrmwwDQYJKoZIhvcNAQEL
BQAwPzELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRowGAYDVQQD
DBFtYWlsLmV4YW1wbGUudGVzdDAeFw0yNjEwMTQxMTEwMTdaFw0yOTEwMTMxMTEw
MTdaMD8xCzAJBgNVBAYTAkRFMRQwEgYDVQQKDAtFeGFtcGxlIFNNQjEaMBgGA1UE
AwwRbWFpbC5leGFtcGxlLnRlc3QwggEiMA0GCSqGSIb3DQEBAQUAA4IBDwAwggEK
AoIBAQDmqVUoTPd2aFC+8LSdNLIOchjWcstZhyMx4DJlY+FbKHMiFSMruXbW6B61
sBDJPh78+C8niKzI0GY4p/PujEoNBmXBzkC4CJkMYCv0XlYBqJNyRaAqX9OMW573
mCp0f0J0h2PqlyHTj+wvCLkrHZcen0fF2xIl3g5TSOuJJVwGtjPdXcGfPooCL7Ln
vdNci1ehmGrDMrnGQWktBgFZSUzkSYMMTo/uIa4gM5lu9+mT5Zx7kg8SZft4wibP
kWhlXY2bECv8CFAGWF5YMeEtpfopTreBKkbWjN8qYOAKXpzGWoh5VNuVivuKw3GH
FDQDbo0mW5aMy2E8CKtq326Ib+aNAgMBAAGjUzBRMB0GA1UdDgQWBBRyAJgmkU5Q
zrRwJBmigQ3PMAF9QTAfBgNVHSMEGDAWgBRyAJgmkU5QzrRwJBmigQ3PMAF9QTAP
BgNVHRMBAf8EBTADAQH/MA0GCSqGSIb3DQEBCwUAA4IBAQDU0p349XANQDJQ3jmA
XubpR+6tl/NJurnUq/SorwW+3KrFrCfzsEKQ/gPeUpDSUyqfMZ3pqeAybf6GPxOy
yB3QjGVFp4A3eVNFib3yOB0NKtshCVjJb76jfp0J5aVrqgZofUuUVrgX5L8Di9iQ
9rRxUkDvPLiA5CMQiGt1k0etVKIMSY695CIDmSeP/SwJF5MksfMXkIBqbkMYziCz
bFoJHije+2/ZLhL57eaG8jdbavVq520MDMIDcfmyW2LZpjnyUZu2ntNPL083LAA4
Hee6UgeoyuZapBEVSzm4C0YmObWEKdta4zHOb0qltB9rjC4dKGdYyZW/y8qpcMJo
+Vt/
-----END CERTIFICATE-----
)PEM";

const char* const kUser2CertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIICJTCCAaygAwIBAgIUP/bVIzaOddXN8BMBWa++TGlPQvUwCgYIKoZIzj0EAwMw
SjELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMSUwIwYDVQQDDBxi
b2Iud29ya3N0YXRpb24uZXhhbXBsZS50ZXN0MB4XDTI2MTAxNDExMTAxN1oXDTI4
MTAxMzExMTAxN1owSjELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01C
MSUwIwYDVQQDDBxib2Iud29ya3N0YXRpb24uZXhhbXBsZS50ZXN0MHYwEAYHKoZI
zj0CAQYFK4EEACIDYgAErBgBe3V4FiRmahlH5hgWUSqcyhYO6QRF/HwXBiWk1pHg
nNwrwX3kayc7V6Wu5Lq26Wb/Vk7R/bv4tZbIUvbZbjBNjHvLaVqpIwbPYLESGfEo
2RkWTY4NMLlmmioganiio1MwUTAdBgNVHQ4EFgQUVFv45sF+ZmNLD9NYRmLHolN0
1pkwHwYDVR0jBBgwFoAUVFv45sF+ZmNLD9NYRmLHolN01pkwDwYDVR0TAQH/BAUw
AwEB/zAKBggqhkjOPQQDAwNnADBkAjAyKNWfldFbSt5gltmSAmsL94wuYVsJ24xI
Tzj90rij4hYMM8DOnjMovxkd59f9/0YCMHS0n9XvrdkGLOMy6gFHKTufnE9FRKQB
Y250iEzBlUZAzaNbhL2U/otctgQX9sPegw==
-----END CERTIFICATE-----
)PEM";

const char* const kUser3CertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIIFeTCCA2GgAwIBAgIUUaaKvZhYscJMOyZLxkKvkm1sKyUwDQYJKoZIhvcNAQEO
BQAwTDELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMScwJQYDVQQD
DB5jYXJvbC53b3Jrc3RhdGlvbi5leGFtcGxlLnRlc3QwHhcNMjYxMDE0MTExMDIw
WhcNMjgxMDEzMTExMDIwWjBMMQswCQYDVQQGEwJERTEUMBIGA1UECgwLRXhhbXBs
ZSBTTUIxJzAlBgNVBAMMHmNhcm9sLndvcmtzdGF0aW9uLmV4YW1wbGUudGVzdDCC
AiIwDQYJKoZIhvcNAQEBBQADggIPADCCAgoCggIBALLsFZXODD+3VhGvBS3EQmAt
VGKWj+4YTgDUltysqQhhpHaRYQTPvA5UrpPsDs+k02gVHPTrJGvqELk0lHQuyHqY
Dyb3qf4OvNC2nRI4e0iKqVIgwxNJqt9T0bYI1FDtyVa0MrEqjRUEYGkdgI1Uzm3h
cKVYydkNDtV/RBl/iFhsID7JFcNx9SSxLlZETuwCmQ3cLr21TTgBsCHwU+AGogcG
+GqlgLfHyC0pJm/ET45R5d7YQ3WzYHamPluQUStdEmPzqkfoi8lNOLqJ6sm3pum9
mVn/wKWYbII/fcJLS1HAPIUeS3XR9gV9ccD/tfGVmilTXNArmiiqfBVIaRMStPCe
uY3Uc4pXJuqwM/uIKK3K+e8dpxI44FfrA1Y2tMnVyjVAgqGmhBKxj6aDTeLOXycO
UZJSVlWWyRTZRKVcWJA/+aJws8mAR5GDCD9e5tS58lWFLdeUMWieiaOw+qGs21Km
yaS1+2cfJ9trA2MRn3pKl7r035hvwozNTL+XVue4lpGoo7gFlYTsKzmK6VigHEa6
oNxxatL4siiSAozKN2CN/F17yRKfpTybeqXUba4XKajnGXMaZVuPROT0p4KX5zYO
9WlyhSKPw852rs7mgdes4FNM0uZDb9wUtq0AlQvU8r/ofhn+LlFxNKT4xnOlA7bH
7q1/wGPv2Y2mAGWvRXydAgMBAAGjUzBRMB0GA1UdDgQWBBSQXlDEwEAHjj1fcabr
dE6i3AVc4zAfBgNVHSMEGDAWgBSQXlDEwEAHjj1fcabrdE6i3AVc4zAPBgNVHRMB
Af8EBTADAQH/MA0GCSqGSIb3DQEBDgUAA4ICAQB5MzWz5ALBNVIbIjQHN7o7ThPH
RqWqcVPHxl9CUCeHfboMv+MpZN4wzPu3BYTu5vQvJoMNoPBVHjMkKEE0R67K9gIC
Z0kczK8LPoEmUW4+AWlhzXm+m7E1nl8hQXBTU0rrsuNb9qm5A3Usoel3LcM4axQu
JWTF+PwS0rVh6beielvuDAWiWTCQxcfTmnSCdSivr0hG6hOVZCEB5pNOOAuta5Px
CAUKpYRp1x/QpFOlL2AfVPIy8+cjm3ifSkJ1KxevfPUeVfukZzjUZFJuymrDpTkN
kRXcbONUKOJvomeZncrn/+0O19trEJR2tD4qlEP0juRZ3hTwEoNgiUXA20brQ0ap
iwFxph4aNGHhM5olkanRsasYzWqR0xZjh21hX6mhPVkMUPaAOmMJhEsTrWSWeKv2
eYKwRLIMoVu7kCkZzePsB0c/Ugkxeu3BybET8lDIDtvLgz8u6dWpf0P6FlaPFXGn
/RA/Yh5yt7GeikvsJFgPDxUxoT54tGHjvWuo903X0lCFYGEnf6aKsgmOO/m6mmgy
PEqGJlm1+0fusi59NEYxuN1V0ZEZ6sFVIQgJa7Low6wPJyi+WI2dTHOCusIbCxUS
LUo0mGxbqGczVUj/jhtqJnoTQEeKwawIkpjO8TbmTxCNWotnTsSznlFVXhFzQVms
3WAl8yBa/grpMhtg9A==
-----END CERTIFICATE-----
)PEM";

const char* const kSingleServerCertPem = R"PEM(-----BEGIN CERTIFICATE-----
MIIDYzCCAkugAwIBAgIUaXj1rm+OWNXzY6GX2W9qqnSYg/wwDQYJKoZIhvcNAQEL
BQAwQTELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRwwGgYDVQQD
DBNzZXJ2ZXIuZXhhbXBsZS50ZXN0MB4XDTI2MTAxNDExMTAyMFoXDTI4MTAxMzEx
MTAyMFowQTELMAkGA1UEBhMCREUxFDASBgNVBAoMC0V4YW1wbGUgU01CMRwwGgYD
VQQDDBNzZXJ2ZXIuZXhhbXBsZS50ZXN0MIIBIjANBgkqhkiG9w0BAQEFAAOCAQ8A
MIIBCgKCAQEA5KbrB1GBDOkJXNEMcVhwtzkxcodl9ARPc6uCzApXvdpo+HLlLtWi
AU7AB2De9nw/F8GCyAYn8ofCL8AVczc0DYNgiufgM1y0k/7XSAGOdPjB1iqgVns1
dxYNBCEEUKepn7QrgZaTGCKCP8rKliha5Mnim8MwdB1TGZ2OtC3nKbYPRx+egN0w
3XXsHhe4bMANHkA+lx83o5TjMuNKfIEJ6jdNlnpgLpZgUnWNEAbveMWLyt8FctkZ
3Tw+yKfuBdPjdpcPxitFgOVLgORHvSPkhM7foaOiplze3gYzaMiwclskK5obh7v2
bU2ZF1lL0oyOE9RBg4qqA4YIV2pvAqNq1wIDAQABo1MwUTAdBgNVHQ4EFgQUP+95
YoTMX4dKyMOc3EEuyrRg0jcwHwYDVR0jBBgwFoAUP+95YoTMX4dKyMOc3EEuyrRg
0jcwDwYDVR0TAQH/BAUwAwEB/zANBgkqhkiG9w0BAQsFAAOCAQEAjWmiwS9nftNS
u2mW3vu5DkEK1eyyV6MzUsMN1TtJTsLOZgWkPg3CNI+PuRg/Q6Siv/6hxVcdBmrS
10S2PlF11veZBChAqk94OCEhKlhjSJJLyqaqfHul3S2PTinw8Tsu87930czcPR+1
9DnTG+dIdF9waOj563mmNC+OyTd1GpUhdSvBcdnitBzLuC6m2IPosDZ9GBGxMab0
Y4Z2FHz9ml0Xi7ikjWvNCrOatP/x5ci5XnypLzJh5YYS7hucBmbdx+zib1sLwpEj
CVdmGfjMcQQlaPBLITyMg7KiMKsT9vP2zuaQJGQxLvtIEQ+cDt5v4wnaOhqlNUn0
MEG5hcNtpw==
-----END CERTIFICATE-----
)PEM";

const char* const kUser1CertDerHex =
    "3082037930820261a00302010202146cf96b6b797157b7b5f60019482edbb9aaf4df6f300d06092a864886f70d01010b"
    "0500304c310b300906035504061302444531143012060355040a0c0b4578616d706c6520534d42312730250603550403"
    "0c1e616c6963652e776f726b73746174696f6e2e6578616d706c652e74657374301e170d323631303134313131303137"
    "5a170d3237313031343131313031375a304c310b300906035504061302444531143012060355040a0c0b4578616d706c"
    "6520534d423127302506035504030c1e616c6963652e776f726b73746174696f6e2e6578616d706c652e746573743082"
    "0122300d06092a864886f70d01010105000382010f003082010a02820101008a9f2ed92f1c27e4538a91d8722b8ce0ad"
    "8c24656638c9c0fa2b9971f97345014917f98acb9bcacc1bf933b8b2edcb1134655beb444b096c135f7cb19963a2b295"
    "f3023daec2430f70518b106f6b02b293143512f8dc9d6a47c2eddf6cc76c21cb1ac21aabcf182d9c23f745f16881d964"
    "acbaaf9e757d806e079ae4e233bcd2a52142a4b39ff40e005cea5230dd93855f16360cea2cd45b29aa2093ec4c82ebea"
    "f60d2f1a7f208746a7499d6b92b9a4acf7cc951f94344d636500b8111953fef4d0c39d1e79373229948fd20c333ca7e6"
    "a03feaca16dbf99808f6710632652051b2d813ca982a5704bceb4e4ef498dba2780b6f44efe0c49728f3f2108a50a702"
    "03010001a3533051301d0603551d0e041604147af1c1e0657f64b468af6b563cc71c230945799b301f0603551d230418"
    "301680147af1c1e0657f64b468af6b563cc71c230945799b300f0603551d130101ff040530030101ff300d06092a8648"
    "86f70d01010b050003820101007f34f6fcd9cdf5f2781d668241ac8bb1eb0a6277f6e077b4b09153f0255314a903141d"
    "a101be230fa4e8128a3abc398d2df38412acc526ceb5e1071eee80b1e5ebd76ba7c317871cede00b730db0dcb17cd6a0"
    "733e9a7d2f2dca8933394e8975e00668545325da36e4e0cae4eaf916b4332bae329b28f46093666e483a737286a582f5"
    "9a54f3da3a9cc5e521451697d0a02456bd364c3c239a2ecdb91b7dde7fccc6197031400fd14390fa73e349387d527884"
    "8029e3c7c4a16aead1d14c0dfcb3a2503020934a494fc5e16c17340b2741581a1d341eb7fecc717370b1ac6e2c431aa2"
    "89037f30c8510681f68073248fb69be0249bb62551f3f5d31df470750f";

}  // namespace twinaudit::harness::certs
