pub mod scalar_lfcpa;
