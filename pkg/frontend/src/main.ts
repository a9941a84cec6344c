import { RainApi } from './api';
import { createApp } from './app';
import './style.css';

const root = document.querySelector<HTMLElement>('#app');
if (root) {
  createApp(root, new RainApi());
}
