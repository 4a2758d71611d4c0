// placeholder; implementation added with its module
