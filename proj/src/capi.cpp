extern "C" const char* hd_version(void) { return "0.1.0"; }
