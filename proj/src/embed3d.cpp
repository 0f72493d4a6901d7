namespace qss {}
