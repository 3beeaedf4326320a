// Shapes of the API payloads the client consumes. All permission answers
// come from the server; the client only renders what it was given.

export type RoleName = "DirCreator" | "thisGroup" | "grantGroup" | "grantUser" | "AnyUser";
export type RightName = "Publish" | "Read" | "CreateSubDir" | "ShowDir";

export const ROLE_NAMES: RoleName[] = ["DirCreator", "thisGroup", "grantGroup", "grantUser", "AnyUser"];
export const RIGHT_NAMES: RightName[] = ["Publish", "Read", "CreateSubDir", "ShowDir"];

export type Matrix = Record<RoleName, Record<RightName, boolean>>;

export interface ViewerInfo {
  roles: string[];
  rights: Record<RightName, boolean>;
  is_owner: boolean;
  is_member: boolean;
  has_pending_application: boolean;
  is_blacklisted: boolean;
}

export interface DirInfo {
  id: string;
  name: string;
  parent: string | null;
  owner: string;
  state: "Active" | "Trashed";
  visibility: "Public" | "Private";
  created_at: number;
  member_count: number;
  viewer: ViewerInfo;
}

export interface BarSegment {
  id: string;
  name: string;
}

export interface Bar {
  segments: BarSegment[];
  text: string;
}

export interface ArticleMeta {
  id: string;
  directory: string;
  title: string;
  abstract: string;
  author: string;
  url: string;
  published_at: number;
  attachments: { filename: string; size: number }[];
}

export interface Article extends ArticleMeta {
  body: string;
}

export interface SearchHit {
  bar: Bar;
  directory_id: string;
  article_id?: string;
  article_url?: string;
  title?: string;
}

export type SearchModeName = "DIR" | "KEY" | "MY_DIR" | "MY_KEY" | "MY_ALL_DIR";

// the five selector options, labeled as on the page
export const SEARCH_MODES: { value: SearchModeName; label: string }[] = [
  { value: "DIR", label: "DIR" },
  { value: "KEY", label: "KEY" },
  { value: "MY_DIR", label: "My DIR" },
  { value: "MY_KEY", label: "MY KEY" },
  { value: "MY_ALL_DIR", label: "MY ALL DIR" },
];

export interface Application {
  username: string;
  applied_at: number;
}

export interface Grants {
  users: string[];
  groups: { id: string; name: string | null }[];
}

export interface MountBinding {
  id: string;
  directory: string;
  account: string;
  agent_id: string;
  share_path: string;
  label: string;
  live: boolean;
  created_at: number;
}

export interface MountEntry {
  binding_id: string;
  label: string;
  name: string;
  kind: "File" | "Dir";
  size: number;
  modified: number;
  availability: "Live" | "Unavailable";
}

export interface SessionUser {
  id: string;
  username: string;
}
