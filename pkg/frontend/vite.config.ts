/// <reference types="vitest/config" />
import { defineConfig } from 'vite';

export default defineConfig({
  build: {
    outDir: 'dist',
  },
  server: {
    // During development the API runs separately via `rain serve`.
    proxy: {
      '/graphs': 'http://127.0.0.1:8000',
      '/sessions': 'http://127.0.0.1:8000',
      '/projections': 'http://127.0.0.1:8000',
    },
  },
  test: {
    environment: 'jsdom',
    include: ['tests/**/*.test.ts'],
  },
});
