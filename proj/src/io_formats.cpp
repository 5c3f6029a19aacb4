namespace hdtm {}
